#include <doctest.h>

#include "finpart/cutoff.hpp"
#include "finpart/mellin.hpp"
#include "finpart/multi.hpp"
#include "finpart/residue.hpp"
#include "test_support.hpp"

using namespace finpart;
using namespace finpart::test;

TEST_CASE("tame form: residue, pairing, poles and both engines agree") {
  ProblemGenerator gen(301);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3;
    const int m = 2;
    const SingularForm w = gen.tame_form(n, m, 2, 2);
    REQUIRE(tame_check(w).tame);
    const Form test = gen.form(w.layout(), n - 2, 2, ProblemGenerator::support_windows(w.layout()), 3);
    const SingularForm top = wedge(w, test);
    const auto mu0 = MorseBott::standard(n, m);

    const auto mellin = expansion(top, mu0);
    const auto fit = cutoff_expansion(top, mu0);
    const Complex paired = pair_on_Y(residue_map(w), test);
    CHECK(std::abs(mellin.log_coeff - paired) < 1e-8);
    CHECK(std::abs(fit.expansion.log_coeff - mellin.log_coeff) < 1e-4);
    CHECK(std::abs(fit.expansion.finite_part - mellin.finite_part) < 1e-4);

    std::map<int, Complex> poles;
    for (const auto& [k, r] : pole_table(top)) poles[k] = r;
    CHECK(std::abs(poles[0] - mellin.log_coeff) < 1e-12);
    for (const auto& [k, v] : mellin.divergent) CHECK(std::abs(static_cast<double>(k) * v - poles[k]) < 1e-10);

    // The residue at 0 from a contour integral of zeta.
    const ZetaEvaluator z(top, mu0);
    Complex contour{};
    const int points = 32;
    const double radius = 0.5;
    for (int j = 0; j < points; ++j) {
      const Complex s = std::polar(radius, 2 * kPi * j / points);
      contour += s * z.evaluate(s).value / static_cast<double>(points);
    }
    CHECK(std::abs(contour - mellin.log_coeff) < 1e-8);
  }
}

TEST_CASE("level sets integrate to zeta") {
  ProblemGenerator gen(302);
  const Layout L = Layout::single(3, 2);
  const SingularForm w = gen.top_form(L, 1, 2);
  for (double s : {2.5, 3.0}) {
    const Complex a = mellin_of_level_set(w, s);
    const Complex b = zeta_eval(w, MorseBott::standard(3, 2), s).value;
    CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(b)));
  }
  const double t = 0.35;
  const auto phi = gen.phi(3, 2);
  const Complex direct = level_set_integral_numeric(w, MorseBott::standard(3, 2), t);
  CHECK(std::isfinite(std::abs(direct)));
  CHECK(std::isfinite(std::abs(level_set_integral_numeric(w, MorseBott(2, phi), t))));
}

TEST_CASE("conformal change: cutoff finite parts follow the law") {
  ProblemGenerator gen(303);
  const Layout L = Layout::single(2, 2);
  const SingularForm w = gen.top_form(L, 2, 2);
  const auto phi = gen.phi(2, 2);
  const auto moved = cutoff_expansion(w, MorseBott(2, phi)).expansion;
  const auto fixed = cutoff_expansion(w, MorseBott::standard(2, 2)).expansion;
  const auto mellin_moved = expansion(w, MorseBott(2, phi));
  const Complex law = expansion(phi * w, MorseBott::standard(2, 2)).log_coeff;
  CHECK(std::abs(moved.log_coeff - fixed.log_coeff) < 1e-4);
  CHECK(std::abs(moved.finite_part - fixed.finite_part - law) < 1e-4);
  CHECK(std::abs(mellin_moved.finite_part - moved.finite_part) < 1e-4);
}

TEST_CASE("crossing and boundary pipelines") {
  const Layout cross(4, {Block{0, 2}, Block{2, 2}});
  ProblemGenerator gen(304);
  const CrossingProblem p(SingularForm(std::vector<int>{1, 1}, volume(cross, one(4) + gen.polynomial(4, 2, 3))));
  const auto ex = multi_expansion(p);
  for (const auto& [M, v] : ex.coefficients) CHECK(std::abs(coefficient_IM_contour(p, M) - v) < 1e-8);
  const std::vector<Polynomial> phis{gen.phi(4, 2), gen.phi(4, 2)};
  CHECK(crossing_conformal_check(p, phis).max_residual() < 1e-6);

  const Layout half = Layout::single(2, 1);
  const Form num = volume(half, one(2) + gen.polynomial(2, 2, 3));
  const BoundaryProblem b{num, 2, Polynomial(2)};
  const auto mellin = boundary_expansion(b);
  const auto fit = boundary_cutoff_expansion(b).expansion;
  CHECK(std::abs(fit.log_coeff - mellin.log_coeff) < 1e-4);
  CHECK(std::abs(fit.finite_part - mellin.finite_part) < 1e-4);
}
