#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "finpart/exterior.hpp"
#include "finpart/quadrature.hpp"

namespace finpart {

// Normal directions are integrated over the unit sphere S^{m-1} for a
// Morse-Bott locus and over the half-line {+1} at a boundary.
enum class NormalGeometry { Sphere, HalfLine };

// Part of a level-set integral sharing one radial window product:
//   prod_k w_k(t^2) * t^shift * sum_j coeffs[j] t^j.
struct RadialComponent {
  std::vector<Window> window;
  std::vector<Complex> coeffs;
};

// I(t) = sum over components. For a form mu_0^{-N} eta of top degree the
// shift is m - 2N; at a boundary x_1^{-M} eta it is 1 - M.
struct RadialProfile {
  int shift = 0;
  NormalGeometry geometry = NormalGeometry::Sphere;
  std::vector<RadialComponent> components;

  bool is_zero() const;
  // Sum of coeffs[j] over components whose window has a pole.
  Complex pole_coefficient(int j) const;
  // Sum of coeffs[j] over every component.
  Complex coefficient(int j) const;
  int max_degree() const;
};

struct MellinOptions {
  int gauss_order = kDefaultGaussOrder;
  int panels = kDefaultPanels;
  int max_series_depth = 60;
  double series_tolerance = 1e-15;
  // Factor exp(s c) out of the conformal series when phi has a constant
  // term c. Disable to exercise the series itself.
  bool split_constant = true;
};

// Level-set profile of a top-degree form. Every term needs radial windows in
// mu_0 and a window on every base coordinate.
RadialProfile radial_profile(const SingularForm& omega, const MellinOptions& options = {});

// Same for numerator * x_normal^{-power} on a half-line (boundary case,
// layout with a single normal block {x_1}) or mu_0^{-power} on a sphere.
RadialProfile radial_profile(const Form& numerator, int power, NormalGeometry geometry,
                             const MellinOptions& options = {});

// sum_j c_j W(s + shift + j). Throws PoleError at a pole.
Complex profile_zeta(const RadialProfile& profile, Complex s, const MellinOptions& options = {});

// res_{s=k} of profile_zeta.
Complex profile_residue(const RadialProfile& profile, int k);

// Constant term of the Laurent expansion at s = 0.
Complex profile_finite_part(const RadialProfile& profile, const MellinOptions& options = {});

struct ZetaValue {
  Complex value;
  double truncation = 0.0;  // size of the first omitted series term
  int depth = 0;            // number of conformal series terms used
};

// zeta(s; mu, omega) = int mu^{s/2} omega, meromorphically continued.
class ZetaEvaluator {
 public:
  ZetaEvaluator(const SingularForm& omega, const MorseBott& mu, MellinOptions options = {});
  // Numerator over mu_0^power (Sphere) or x_1^power (HalfLine, where the
  // zeta function is int (x_1 exp(phi))^s omega).
  ZetaEvaluator(Form numerator, int power, NormalGeometry geometry, Polynomial phi, MellinOptions options = {});

  ZetaValue evaluate(Complex s) const;
  // Simple poles (location, residue) of the standard problem. Conformal
  // problems throw; use expansion() for their divergent coefficients.
  std::vector<std::pair<int, Complex>> poles() const;

  const Form& numerator() const { return numerator_; }
  int power() const { return power_; }
  NormalGeometry geometry() const { return geometry_; }
  bool is_standard() const { return standard_; }

 private:
  const RadialProfile& series_profile(int l) const;

  Form numerator_;
  int power_ = 0;
  NormalGeometry geometry_ = NormalGeometry::Sphere;
  bool standard_ = true;
  MellinOptions options_;
  Complex constant_{};
  Polynomial varying_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

ZetaValue zeta_eval(const SingularForm& omega, const MorseBott& mu, Complex s,
                    const MellinOptions& options = {});

std::vector<std::pair<int, Complex>> pole_table(const SingularForm& omega, const MellinOptions& options = {});

enum class Engine { Mellin, Cutoff };
std::string to_string(Engine e);

struct AsymptoticExpansion {
  std::map<int, Complex> divergent;  // k -> I_{-k}, k = 1..2N-m
  Complex log_coeff;                 // I_0
  Complex finite_part;               // I_finite
  Engine engine = Engine::Mellin;
  double error_estimate = 0.0;
};

// res_{s=k} zeta(s; mu, omega) for k > 0 with conformal mu: the normal
// degree 2N-m-k part of exp(k phi) omega, integrated exactly over the sphere
// and by quadrature over the base.
Complex conformal_residue(const SingularForm& omega, const MorseBott& mu, int k,
                          const MellinOptions& options = {});

AsymptoticExpansion expansion(const SingularForm& omega, const MorseBott& mu, const MellinOptions& options = {});
// General form: numerator over mu_0^power (Sphere) or x_1^power (HalfLine),
// conformal exponent phi (zero polynomial for the standard function).
AsymptoticExpansion expansion(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                              const MellinOptions& options = {});

// Integral of p(x_B) * exp(g(x_B)) * prod windows over the base coordinates
// by tensor Gauss-Legendre quadrature. p and g are polynomials in the full
// variable set that must not depend on normal coordinates.
Complex base_exp_integral(const Polynomial& p, const Polynomial& g, std::span<const int> base_coords,
                          std::span<const std::vector<Window>> windows, int order = 32);

}  // namespace finpart
