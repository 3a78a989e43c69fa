#pragma once

#include <compare>
#include <vector>

namespace finpart {

// Smooth cutoff in the squared variable u:
//
//   q(x) = exp(-1/x) for x > 0, 0 otherwise
//   w(u) = q(b^2 - u) / (q(b^2 - u) + q(u - a^2))   for a^2 < u < b^2
//   w(u) = 1 for u <= a^2,   w(u) = 0 for u >= b^2.
//
// `order` selects the derivative d^k w / du^k; d of a form multiplies by
// 2 x_i w^{(k+1)} and bumps the order, so forms stay closed under d.
struct Window {
  double inner = 0.5;
  double outer = 0.9;
  int order = 0;

  Window() = default;
  Window(double a, double b, int k = 0);

  double operator()(double u) const;
  Window derivative() const { return Window(inner, outer, order + 1); }

  friend auto operator<=>(const Window&, const Window&) = default;
  friend bool operator==(const Window&, const Window&) = default;
};

inline constexpr double kDefaultInner = 0.5;
inline constexpr double kDefaultOuter = 0.9;

// Value and derivatives of the bump up to `max_order` at u, i.e. entries
// w(u), w'(u), ..., w^{(max_order)}(u).
std::vector<double> window_jet(double inner, double outer, double u, int max_order);

}  // namespace finpart
