#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "finpart/exterior.hpp"
#include "finpart/random.hpp"
#include "finpart/window.hpp"

namespace finpart::test {

inline constexpr double kPi = std::numbers::pi;

// ------------------------------------------------------------ builders

inline WindowFactor radial(int block = 0, Window w = Window()) { return {WindowFactor::Arg::Radial, block, w}; }
inline WindowFactor coordinate(int i, Window w = Window()) { return {WindowFactor::Arg::Coordinate, i, w}; }

inline WindowProduct windows(std::vector<WindowFactor> w) {
  std::sort(w.begin(), w.end());
  return w;
}

inline Polynomial one(int n) { return Polynomial::constant(n, 1.0); }
inline Polynomial x(int n, int i) { return Polynomial::variable(n, i); }

// c * p * windows * dx_{frame}.
inline Form term(const Layout& layout, std::vector<int> frame, const Polynomial& p, const WindowProduct& w) {
  Form f(layout);
  f.add_term(frame_of(frame), w, p);
  return f;
}

// Volume form dx_1..dx_n with the support windows of the layout.
inline Form volume(const Layout& layout, const Polynomial& p) {
  std::vector<int> all;
  for (int i = 0; i < layout.dimension(); ++i) all.push_back(i);
  return term(layout, all, p, ProblemGenerator::support_windows(layout));
}

inline bool same(const SingularForm& a, const SingularForm& b) { return equivalent(a, b); }

// ------------------------------------------------------------- oracles

// Adaptive Gauss-Kronrod on [lo, hi].
template <class F>
double integrate(F f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14);
}

// log a + int_a^b w(t^2) dt / t.
inline double window_finite_part(const Window& w = Window()) {
  return std::log(w.inner) + integrate([&](double t) { return w(t * t) / t; }, w.inner, w.outer);
}

// int_0^inf t^{sigma-1} w(t^2) dt for real sigma > 0.
inline double window_mellin_oracle(double sigma, const Window& w = Window()) {
  return std::pow(w.inner, sigma) / sigma +
         integrate([&](double t) { return std::pow(t, sigma - 1.0) * w(t * t); }, w.inner, w.outer);
}

// 2 int_0^b w(x^2) dx.
inline double window_line_integral(const Window& w = Window()) {
  return 2.0 * integrate([&](double t) { return w(t * t); }, 0.0, w.outer);
}

// Monte-Carlo estimate of int_{S^{m-1}} y^gamma.
inline double sphere_moment_mc(const std::vector<int>& gamma, int samples, std::uint64_t seed) {
  const int m = static_cast<int>(gamma.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> y(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    double r2 = 0.0;
    for (auto& v : y) {
      v = normal(rng);
      r2 += v * v;
    }
    const double r = std::sqrt(r2);
    double prod = 1.0;
    for (int i = 0; i < m; ++i) prod *= std::pow(y[static_cast<std::size_t>(i)] / r, gamma[static_cast<std::size_t>(i)]);
    sum += prod;
  }
  const double area = 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m);
  return area * sum / samples;
}

}  // namespace finpart::test
