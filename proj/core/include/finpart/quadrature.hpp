#pragma once

#include <memory>
#include <span>
#include <vector>

#include "finpart/error.hpp"
#include "finpart/exterior.hpp"
#include "finpart/polynomial.hpp"
#include "finpart/window.hpp"

namespace finpart {

inline constexpr int kDefaultGaussOrder = 64;
inline constexpr int kDefaultPanels = 4;

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = -1.0;
  double hi = 1.0;

  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule with `order` nodes on [lo, hi].
GaussRule gauss_legendre(int order, double lo = -1.0, double hi = 1.0);

// Concatenation of `order`-point rules on each [b_i, b_{i+1}]; breakpoints
// must be increasing.
GaussRule composite_gauss(int order, std::span<const double> breakpoints);

// Gamma(k/2) for positive integer k: exact recursion from Gamma(1) = 1 and
// Gamma(1/2) = sqrt(pi) for small k, std::tgamma beyond the table.
double gamma_half(int k);

// Integral of y^gamma over the unit sphere S^{m-1}, m = gamma.size():
// zero if any entry is odd, else 2 prod Gamma((g_i+1)/2) / Gamma((|g|+m)/2).
double sphere_moment(std::span<const int> gamma);

// |S^{m-1}| = 2 pi^{m/2} / Gamma(m/2).
double sphere_area(int m);

// Quadrature on the unit sphere S^{m-1}: Gauss-Legendre in each polar angle,
// trapezoid in the azimuth. For m = 1 the sphere is {+1, -1}.
struct SphereRule {
  int dim = 0;
  std::vector<double> directions;  // dim entries per node
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> direction(std::size_t k) const {
    return {directions.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

SphereRule sphere_rule(int m, int order);
// The half-line {+1}: normal geometry at a boundary component.
SphereRule half_line_rule();

// Mellin transform of a product of radial windows,
//   W(sigma) = int_0^inf t^{sigma-1} prod_k w_k(t^2) dt.
// When every factor has derivative order 0 the product is 1 near t = 0 and
// W(sigma) = a^sigma / sigma + int_a^b t^{sigma-1} prod w_k(t^2) dt with a
// single simple pole at 0 of residue 1; otherwise W is entire.
class WindowMellin {
 public:
  WindowMellin() = default;
  explicit WindowMellin(std::vector<Window> product, int order = kDefaultGaussOrder,
                        int panels = kDefaultPanels);

  bool has_pole() const { return has_pole_; }
  double residue() const { return has_pole_ ? 1.0 : 0.0; }
  double inner() const { return lo_; }

  // Throws PoleError within 1e-9 of the pole.
  Complex operator()(Complex sigma) const;
  // Constant term of the Laurent expansion at sigma = 0:
  // log a + int_a^b w(t^2) dt / t for a single window.
  double finite_part() const;
  // Value for sigma != 0, finite part for sigma == 0.
  Complex regular_part(Complex sigma) const;

 private:
  std::vector<Window> product_;
  bool has_pole_ = false;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weighted_;  // quadrature weight * prod w(t^2)
};

// Shared, cached instance; safe for concurrent use.
std::shared_ptr<const WindowMellin> shared_window_mellin(const std::vector<Window>& product,
                                                         int order = kDefaultGaussOrder, int panels = kDefaultPanels);

// int_{-inf}^{inf} x^e prod_k w_k(x^2) dx by composite Gauss-Legendre with
// panels aligned to the window radii. Cached; safe for concurrent use.
double window_moment(const std::vector<Window>& product, int exponent, int order = kDefaultGaussOrder);

// Integral over the base coordinates of p(x) prod_j (prod of windows on x_j).
// p must not depend on any other coordinate; every listed coordinate needs
// at least one window (compact support).
Complex base_integral(const Polynomial& p, std::span<const int> base_coords,
                      std::span<const std::vector<Window>> windows, int order = kDefaultGaussOrder);

}  // namespace finpart
