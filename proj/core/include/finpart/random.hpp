#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "finpart/exterior.hpp"

namespace finpart {

// Seeded generator of test problems. Coefficients are small integers or
// binary fractions so that symbolic identities hold exactly in double.
class ProblemGenerator {
 public:
  explicit ProblemGenerator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() { return rng_; }
  int uniform_int(int lo, int hi);
  double uniform_real(double lo, double hi);

  // Nonzero value k / 2^j with |k| <= 4, j <= 2.
  double coefficient();

  // Up to `terms` random monomials of total degree <= max_degree in the
  // listed variables (all variables when empty), coefficients times scale.
  Polynomial polynomial(int n, int max_degree, int terms = 3, double scale = 1.0,
                        const std::vector<int>& vars = {});

  // Conformal exponent of degree <= max_degree with coefficients scaled by
  // 1/8, keeping exp(2 phi) mu_0 star-shaped on the window support.
  Polynomial phi(int n, int max_degree);

  // Radial window on every block and a coordinate window on every base
  // coordinate; this makes every term compactly supported.
  static WindowProduct support_windows(const Layout& layout);

  // Random homogeneous form of the given degree with up to `frames`
  // distinct frames drawn from dx_i, i in coords (all when empty), each
  // multiplied by `windows`.
  Form form(const Layout& layout, int degree, int max_poly_degree, const WindowProduct& windows, int frames = 2,
            const std::vector<int>& coords = {});

  // Top-degree form mu_0^{-N} eta, compactly supported.
  SingularForm top_form(const Layout& layout, int N, int max_poly_degree);

  // Any degree, compactly supported; used for the d^2 = 0 battery.
  SingularForm singular_form(const Layout& layout, int N, int degree, int max_poly_degree);

  // Tame form of the given degree for even m:
  //   dx_N ^ g0 / mu^r + beta ^ g1 + (d mu / mu) ^ g2 + g3.
  SingularForm tame_form(int n, int m, int degree, int max_poly_degree);

 private:
  std::mt19937_64 rng_;
};

}  // namespace finpart
