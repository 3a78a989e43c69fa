#include "finpart/window.hpp"

#include <cmath>

#include "finpart/error.hpp"

namespace finpart {
namespace {

// Truncated Taylor series: c[i] = f^{(i)}(x0) / i!.
using Series = std::vector<double>;

Series mul(const Series& a, const Series& b) {
  Series r(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Series reciprocal(const Series& a) {
  Series r(a.size(), 0.0);
  r[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += a[j] * r[k - j];
    r[k] = -s / a[0];
  }
  return r;
}

Series exp(const Series& a) {
  // r' = a' r, coefficientwise.
  Series r(a.size(), 0.0);
  r[0] = std::exp(a[0]);
  for (std::size_t k = 1; k < a.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * r[k - j];
    r[k] = s / static_cast<double>(k);
  }
  return r;
}

// Series of q(x0 + sign*h) in h.
Series flat_bump(double x0, double sign, std::size_t len) {
  Series zero(len, 0.0);
  if (x0 <= 0.0 || 1.0 / x0 > 700.0) return zero;
  Series x(len, 0.0);
  x[0] = x0;
  if (len > 1) x[1] = sign;
  Series inv = reciprocal(x);
  for (double& v : inv) v = -v;
  return exp(inv);
}

}  // namespace

Window::Window(double a, double b, int k) : inner(a), outer(b), order(k) {
  if (!(a > 0.0) || !(a < b)) throw InvalidArgument("window radii must satisfy 0 < inner < outer");
  if (k < 0) throw InvalidArgument("negative window derivative order");
}

std::vector<double> window_jet(double inner, double outer, double u, int max_order) {
  const std::size_t len = static_cast<std::size_t>(max_order) + 1;
  std::vector<double> out(len, 0.0);
  const double a2 = inner * inner;
  const double b2 = outer * outer;
  if (u <= a2) {
    out[0] = 1.0;
    return out;
  }
  if (u >= b2) return out;
  Series g = flat_bump(b2 - u, -1.0, len);
  Series h = flat_bump(u - a2, 1.0, len);
  Series denom(len);
  for (std::size_t i = 0; i < len; ++i) denom[i] = g[i] + h[i];
  Series w = mul(g, reciprocal(denom));
  double fact = 1.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (i > 0) fact *= static_cast<double>(i);
    out[i] = w[i] * fact;
  }
  return out;
}

double Window::operator()(double u) const {
  const double a2 = inner * inner;
  const double b2 = outer * outer;
  if (order == 0) {
    if (u <= a2) return 1.0;
    if (u >= b2) return 0.0;
    const double g = std::exp(-1.0 / (b2 - u));
    const double h = (1.0 / (u - a2) > 700.0) ? 0.0 : std::exp(-1.0 / (u - a2));
    return g / (g + h);
  }
  if (u <= a2 || u >= b2) return 0.0;
  return window_jet(inner, outer, u, order)[static_cast<std::size_t>(order)];
}

}  // namespace finpart
