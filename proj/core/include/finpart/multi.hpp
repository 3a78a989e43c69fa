#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "finpart/cutoff.hpp"
#include "finpart/mellin.hpp"
#include "finpart/residue.hpp"

namespace finpart {

// ---------------------------------------------------------------- normal crossings

// Subsets of the components as bit masks: bit i set means i in M.
using ComponentSet = unsigned;

// omega = prod_i mu_i^{-N_i} eta on a layout with one normal block per
// component, mu_i = exp(2 phi_i) * (sum of squares over block i).
struct CrossingProblem {
  SingularForm omega;
  std::vector<Polynomial> phis;  // empty or one per component; zero = standard

  CrossingProblem() = default;
  explicit CrossingProblem(SingularForm form, std::vector<Polynomial> conformal = {});

  int components() const { return omega.layout().block_count(); }
  bool is_standard(int i) const;
  CrossingProblem standard() const;
  // Same denominators, numerator multiplied by p.
  CrossingProblem times(const Polynomial& p) const;
  CrossingProblem with_phi(int i, const Polynomial& phi) const;
};

// Factorized representation of zeta for standard mu_i:
//   sum c * prod_i W_i(s_i + shift_i + j_i).
struct MultiTerm {
  std::vector<std::vector<Window>> windows;  // radial window product per block
  std::vector<int> degree;                   // normal degree j_i per block
  friend auto operator<=>(const MultiTerm&, const MultiTerm&) = default;
};

struct MultiProfile {
  std::vector<int> shift;  // m_i - 2 N_i
  std::map<MultiTerm, Complex> terms;
};

MultiProfile multi_profile(const Form& numerator, const std::vector<int>& powers, const MellinOptions& options = {});

// zeta(s) = int prod_i mu_i^{s_i/2} omega, by the factorized representation
// and, for conformal components, the series in s_i^l phi_i^l / l!.
class MultiZeta {
 public:
  explicit MultiZeta(CrossingProblem problem, MellinOptions options = {});
  Complex evaluate(std::span<const Complex> s) const;
  const CrossingProblem& problem() const { return problem_; }

 private:
  const MultiProfile& profile(const std::vector<int>& powers) const;

  CrossingProblem problem_;
  MellinOptions options_;
  std::vector<int> conformal_;  // indices of conformal components
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

Complex multi_zeta(const CrossingProblem& p, std::span<const Complex> s, const MellinOptions& options = {});

// I_M = res_{s_1=0} ... res_{s_m=0} prod_{i in M} s_i^{-1} zeta. Conformal
// components enter through the first two terms of their series.
Complex coefficient_IM(const CrossingProblem& p, ComponentSet M, const MellinOptions& options = {});

// The same coefficient by trapezoidal contour integrals of MultiZeta on the
// circles |s_i| = radius; independent of the Laurent bookkeeping above.
Complex coefficient_IM_contour(const CrossingProblem& p, ComponentSet M, double radius = 0.5, int points = 24,
                               const MellinOptions& options = {});

struct MultiExpansion {
  std::map<ComponentSet, Complex> coefficients;  // every M, including the empty set
  Complex finite_part;                           // I_[m]
};

MultiExpansion multi_expansion(const CrossingProblem& p, const MellinOptions& options = {});

struct LawCheck {
  std::string law;
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
};

struct CrossingReport {
  std::vector<LawCheck> checks;
  double max_residual() const;
};

// Evaluates independence (1) for every M missing a conformal component,
// law (2) for every M containing one, and the full sum of the corollary.
// Left-hand sides use contour integrals of the conformal zeta function;
// right-hand sides use standard coefficients.
CrossingReport crossing_conformal_check(const CrossingProblem& p, const std::vector<Polynomial>& phis,
                                        const MellinOptions& options = {});

// ---------------------------------------------------------------- boundary

// omega = x_1^{-power} * numerator on x_1 >= 0, with the boundary defining
// function lambda = x_1 exp(phi). Layout: single normal block {x_1}.
struct BoundaryProblem {
  Form numerator;
  int power = 1;
  Polynomial phi;  // zero polynomial for lambda = x_1

  int dimension() const { return numerator.dimension(); }
  bool is_standard() const { return phi.is_zero(); }
};

ZetaValue boundary_zeta(const BoundaryProblem& p, Complex s, const MellinOptions& options = {});
// Simple poles (location, residue) of the standard problem; locations are
// integers <= power - 1.
std::vector<std::pair<int, Complex>> boundary_poles(const BoundaryProblem& p, const MellinOptions& options = {});
AsymptoticExpansion boundary_expansion(const BoundaryProblem& p, const MellinOptions& options = {});
FitReport boundary_cutoff_expansion(const BoundaryProblem& p, const EpsilonGrid& grid = {},
                                    const CutoffOptions& options = {}, const FitOptions& fit = {});

// Logarithmic forms: x_1 omega and (dx_1/x_1) ^ omega smooth near Y.
struct LogarithmicReport {
  bool logarithmic = false;
  std::string reason;
};
LogarithmicReport logarithmic_check(const Form& numerator, int power);

// R((dx_1/x_1) ^ sigma + tau) = sigma|_Y.
ResidueForm boundary_residue(const Form& numerator, int power);

}  // namespace finpart
