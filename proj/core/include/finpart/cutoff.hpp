#pragma once

#include <span>
#include <vector>

#include "finpart/mellin.hpp"

namespace finpart {

using ExtendedComplex = std::complex<long double>;

// Decreasing cutoff radii, all below the inner window radius.
struct EpsilonGrid {
  std::vector<double> values;

  EpsilonGrid() = default;
  explicit EpsilonGrid(std::vector<double> v);
  // eps_i = eps0 * ratio^i, i = 0..count-1.
  static EpsilonGrid geometric(double eps0, double ratio, int count);
  // 12 points from inner/10 with ratio 0.7.
  static EpsilonGrid standard(double inner = kDefaultInner);
  // max(12, min_count) points from inner/10; ratio 0.7 up to divergence
  // order 2, else 0.8.
  static EpsilonGrid adapted(int divergence_order, double inner = kDefaultInner, int min_count = 12);

  std::size_t size() const { return values.size(); }
};

struct CutoffOptions {
  int sphere_order = 24;  // Gauss nodes per polar angle, 2x in the azimuth
  int base_order = 8;     // Gauss nodes per base panel
  int radial_order = 64;  // Gauss nodes per radial panel of the window shell
  int max_root_iterations = 200;
};

// int_{mu >= eps^2} omega for mu = exp(2 phi) mu_0, by polar quadrature.
// Each ray (y, x'') starts at the root r* of r exp(phi(r y, x'')) = eps.
Complex cutoff_integral(const SingularForm& omega, const MorseBott& mu, double eps, const CutoffOptions& options = {});

// Same integral for every eps of the grid in one sweep over the rays.
std::vector<Complex> cutoff_samples(const SingularForm& omega, const MorseBott& mu, std::span<const double> eps,
                                    const CutoffOptions& options = {});

// General form: numerator over mu_0^power (Sphere) or x_1^power on the
// half-line x_1 >= 0, with region x_1 exp(phi) >= eps in the latter case.
std::vector<Complex> cutoff_samples(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                                    std::span<const double> eps, const CutoffOptions& options = {});

// Extended-precision samples; the eps^{-k} terms of high pole orders
// exceed what a double can resolve at the finite-part scale.
std::vector<ExtendedComplex> cutoff_samples_extended(const Form& numerator, int power, NormalGeometry geometry,
                                                     const Polynomial& phi, std::span<const double> eps,
                                                     const CutoffOptions& options = {});

// I(t) = int_{mu = t^2} alpha where omega = (d mu / 2 mu) ^ alpha. Negative
// t is accepted for the standard function only.
Complex level_set_integral_numeric(const SingularForm& omega, const MorseBott& mu, double t,
                                   const CutoffOptions& options = {});
Complex level_set_integral_numeric(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                                   double t, const CutoffOptions& options = {});

// int_0^inf t^{s-1} I(t) dt by Gauss quadrature of the numeric level-set
// integral; needs real s large enough for convergence at t = 0.
Complex mellin_of_level_set(const SingularForm& omega, double s, const CutoffOptions& options = {});

struct FitOptions {
  // Extra columns eps^first, eps^(first+step), ... absorbing the remainder.
  int nuisance = 4;
  int nuisance_first = 1;
  int nuisance_step = 1;
  double max_condition = 1e12;
};

struct FitReport {
  AsymptoticExpansion expansion;
  double residual_norm = 0.0;
  double condition_number = 0.0;
  std::vector<Complex> nuisance;  // fitted remainder coefficients
};

// Least-squares fit of values ~ sum_k I_{-k} eps^{-k} + I_0 log(1/eps) +
// I_finite + sum_i r_i eps^i over the listed divergent powers k.
FitReport fit_expansion(std::span<const double> eps, std::span<const Complex> values,
                        const std::vector<int>& divergent_powers, const FitOptions& options = {});
FitReport fit_expansion(std::span<const double> eps, std::span<const ExtendedComplex> values,
                        const std::vector<int>& divergent_powers, const FitOptions& options = {});

// k = 1..2N-m with k = m mod 2.
std::vector<int> divergent_basis(int m, int N);

// Basis for codimension m and pole order N: k = 1..2N-m with k = m mod 2.
// The remainder columns follow the same parity.
FitReport fit_expansion(std::span<const double> eps, std::span<const Complex> values, int m, int N,
                        const FitOptions& options = {});

// An empty grid selects EpsilonGrid::adapted(2N - m).
FitReport cutoff_expansion(const SingularForm& omega, const MorseBott& mu, const EpsilonGrid& grid = {},
                           const CutoffOptions& options = {}, const FitOptions& fit = {});
// General form over mu_0^power (Sphere) or x_1^power (HalfLine; every
// divergent power k = 1..power-1 and every remainder power enter the fit).
FitReport cutoff_expansion(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                           const EpsilonGrid& grid = {}, const CutoffOptions& options = {}, const FitOptions& fit = {});

}  // namespace finpart
