#include <doctest.h>

#include "finpart/cutoff.hpp"
#include "test_support.hpp"

using namespace finpart;
using namespace finpart::test;

namespace {

SingularForm standard_example() { return SingularForm(1, volume(Layout::single(2, 2), one(2))); }

}  // namespace

TEST_CASE("cutoff integral examples") {
  const auto w = standard_example();
  const auto mu0 = MorseBott::standard(2, 2);
  const double eps = 0.01;
  const double oracle = 2 * kPi * (std::log(0.5 / eps) + (window_finite_part() - std::log(0.5)));
  CHECK(std::abs(cutoff_integral(w, mu0, eps) - oracle) < 1e-6);
  CHECK(std::abs(cutoff_integral(w, mu0, 0.95)) < 1e-14);
  CHECK_THROWS_AS(cutoff_integral(w, mu0, 0.0), InvalidArgument);

  // mu = e^2 mu_0 is mu_0 with eps scaled by 1/e.
  ProblemGenerator gen(4);
  const auto v = gen.top_form(Layout::single(3, 2), 2, 2);
  const MorseBott e2(2, Polynomial::constant(3, 1.0));
  CHECK(std::abs(cutoff_integral(v, e2, eps) - cutoff_integral(v, MorseBott::standard(3, 2), eps / std::exp(1.0))) <
        1e-8 * std::abs(cutoff_integral(v, e2, eps)));
}

TEST_CASE("level-set integrals") {
  const auto w = standard_example();
  const auto mu0 = MorseBott::standard(2, 2);
  CHECK(level_set_integral_numeric(w, mu0, 0.3).real() == doctest::Approx(2 * kPi).epsilon(1e-12));
  CHECK(level_set_integral_numeric(SingularForm(1, Form(Layout::single(2, 2))), mu0, 0.3) == Complex(0.0));
  ProblemGenerator gen(6);
  for (int m : {2, 3}) {
    const int n = m + 1;
    for (int trial = 0; trial < 5; ++trial) {
      const auto v = gen.top_form(Layout::single(n, m), gen.uniform_int(0, 2), 3);
      const auto mu = MorseBott::standard(n, m);
      const double t = gen.uniform_real(0.05, 0.8);
      const double sign = m % 2 == 0 ? 1.0 : -1.0;
      CHECK(std::abs(level_set_integral_numeric(v, mu, -t) - sign * level_set_integral_numeric(v, mu, t)) < 1e-10);
    }
  }
}

TEST_CASE("least-squares fit") {
  const EpsilonGrid grid = EpsilonGrid::geometric(1e-2, 0.7, 12);
  std::vector<Complex> values;
  for (double e : grid.values) values.push_back(3.0 / e + 2.0 * std::log(1.0 / e) + 5.0 + 0.1 * e);
  const FitReport f = fit_expansion(grid.values, values, std::vector<int>{1});
  CHECK(std::abs(f.expansion.divergent.at(1) - 3.0) < 1e-3);
  CHECK(std::abs(f.expansion.log_coeff - 2.0) < 1e-3);
  CHECK(std::abs(f.expansion.finite_part - 5.0) < 1e-3);
  CHECK(f.expansion.engine == Engine::Cutoff);
  CHECK(f.condition_number > 0.0);

  std::vector<Complex> constant(grid.size(), Complex(7.25));
  const FitReport c = fit_expansion(grid.values, constant, 2, 2);
  CHECK(std::abs(c.expansion.divergent.at(2)) < 1e-9);
  CHECK(std::abs(c.expansion.log_coeff) < 1e-9);
  CHECK(std::abs(c.expansion.finite_part - 7.25) < 1e-9);

  const std::vector<double> flat(16, 0.01);
  const std::vector<Complex> vals(16, Complex(1.0));
  CHECK_THROWS_AS(fit_expansion(flat, vals, std::vector<int>{1}), NumericalFailure);
  CHECK_THROWS_AS(fit_expansion(std::span<const double>(grid.values).first(3),
                                std::span<const Complex>(values).first(3), std::vector<int>{1}),
                  InvalidArgument);

  CHECK(divergent_basis(2, 3) == std::vector<int>{2, 4});
  CHECK(divergent_basis(3, 3) == std::vector<int>{1, 3});
  CHECK(divergent_basis(2, 1).empty());

  const auto s = cutoff_expansion(standard_example(), MorseBott::standard(2, 2), EpsilonGrid::standard());
  CHECK(std::abs(s.expansion.log_coeff - 2 * kPi) < 1e-4);
}

TEST_CASE("cutoff engine agrees with the Mellin engine") {
  ProblemGenerator gen(12);
  double worst_log = 0.0;
  double worst_fin = 0.0;
  double worst_div = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const int N = gen.uniform_int(1, 3);
    const auto w = gen.top_form(Layout::single(n, 2), N, 2);
    const auto mu0 = MorseBott::standard(n, 2);
    const auto a = expansion(w, mu0);
    const auto b = cutoff_expansion(w, mu0).expansion;
    worst_log = std::max(worst_log, std::abs(a.log_coeff - b.log_coeff));
    worst_fin = std::max(worst_fin, std::abs(a.finite_part - b.finite_part));
    for (const auto& [k, v] : a.divergent) worst_div = std::max(worst_div, std::abs(v - b.divergent.at(k)));
  }
  CHECK(worst_log < 1e-4);
  CHECK(worst_fin < 1e-4);
  CHECK(worst_div < 1e-3);
}

TEST_CASE("conformal invariance measured by the cutoff engine") {
  ProblemGenerator gen(13);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = gen.uniform_int(2, 3);
    const auto w = gen.top_form(Layout::single(n, 2), gen.uniform_int(1, 2), 2);
    const Polynomial phi = gen.phi(n, 2);
    const auto moved = cutoff_expansion(w, MorseBott(2, phi)).expansion;
    const auto fixed = cutoff_expansion(w, MorseBott::standard(n, 2)).expansion;
    CHECK(std::abs(moved.log_coeff - fixed.log_coeff) < 1e-4);
    const Complex law = expansion(phi * w, MorseBott::standard(n, 2)).log_coeff;
    CHECK(std::abs(moved.finite_part - fixed.finite_part - law) < 1e-4);
  }
}
