#include <doctest.h>

#include "finpart/cutoff.hpp"
#include "finpart/mellin.hpp"
#include "test_support.hpp"

using namespace finpart;
using namespace finpart::test;

namespace {

SingularForm standard_example(int N = 1, const Polynomial& p = one(2)) {
  return SingularForm(N, volume(Layout::single(2, 2), p));
}

Complex coefficient(const RadialProfile& prof, int j) { return prof.coefficient(j); }

}  // namespace

TEST_CASE("radial profile examples") {
  const RadialProfile a = radial_profile(standard_example());
  CHECK(a.shift == 0);
  CHECK(coefficient(a, 0).real() == doctest::Approx(2 * kPi).epsilon(1e-14));
  for (int j = 1; j <= a.max_degree(); ++j) CHECK(std::abs(coefficient(a, j)) < 1e-15);

  const RadialProfile b = radial_profile(standard_example(0));
  CHECK(b.shift == 2);
  CHECK(coefficient(b, 0).real() == doctest::Approx(2 * kPi).epsilon(1e-14));

  const RadialProfile c = radial_profile(standard_example(1, x(2, 0)));
  for (int j = 0; j <= std::max(0, c.max_degree()); ++j) CHECK(std::abs(coefficient(c, j)) == 0.0);

  const Layout L = Layout::single(2, 2);
  CHECK_THROWS_AS(radial_profile(SingularForm(1, Form::differential(L, 0))), InvalidArgument);
  CHECK_THROWS_AS(radial_profile(SingularForm(1, term(L, {0, 1}, one(2), {}))), InvalidArgument);
}

TEST_CASE("zeta evaluation") {
  const SingularForm w = standard_example();
  const auto mu0 = MorseBott::standard(2, 2);
  CHECK(zeta_eval(w, mu0, 2.0).value.real() == doctest::Approx(2 * kPi * window_mellin_oracle(2.0)).epsilon(1e-12));

  const MorseBott four(2, Polynomial::constant(2, 0.5 * std::log(4.0)));
  MellinOptions series;
  series.split_constant = false;
  const Complex ratio = zeta_eval(w, four, 2.0, series).value / zeta_eval(w, mu0, 2.0).value;
  CHECK(std::abs(ratio - 4.0) < 1e-12);

  CHECK(zeta_eval(SingularForm(1, Form(Layout::single(2, 2))), mu0, Complex(0.3, 0.7)).value == Complex(0.0));

  bool threw = false;
  try {
    zeta_eval(w, mu0, 0.0);
  } catch (const PoleError& e) {
    threw = true;
    CHECK(e.residue().real() == doctest::Approx(2 * kPi).epsilon(1e-14));
  }
  CHECK(threw);
}

TEST_CASE("homogeneity at random points") {
  ProblemGenerator gen(3);
  const Layout L = Layout::single(3, 2);
  const SingularForm w = gen.top_form(L, 2, 2);
  const auto mu0 = MorseBott::standard(3, 2);
  MellinOptions series;
  series.split_constant = false;
  for (int i = 0; i < 10; ++i) {
    const double t = i % 2 == 0 ? 2.0 : 4.0;
    const Complex s(gen.uniform_real(-1.5, 2.5), gen.uniform_real(0.25, 2.0));
    const Complex lhs = zeta_eval(w, MorseBott(2, Polynomial::constant(3, 0.5 * std::log(t))), s, series).value;
    const Complex rhs = std::pow(t, s / 2.0) * zeta_eval(w, mu0, s).value;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("pole tables") {
  {
    const auto poles = pole_table(standard_example());
    REQUIRE(poles.size() == 1);
    CHECK(poles[0].first == 0);
    CHECK(poles[0].second.real() == doctest::Approx(2 * kPi).epsilon(1e-14));
  }
  {
    // (1 + x_1^2) / mu_0^2: c_0 = 2 pi at s = 2, c_2 = pi at s = 0.
    const SingularForm w = standard_example(2, one(2) + x(2, 0) * x(2, 0));
    const auto poles = pole_table(w);
    REQUIRE(poles.size() == 2);
    std::map<int, Complex> table(poles.begin(), poles.end());
    CHECK(table.at(2).real() == doctest::Approx(2 * kPi).epsilon(1e-14));
    CHECK(table.at(0).real() == doctest::Approx(kPi).epsilon(1e-14));
    // Brute force: s zeta(s) near the pole.
    const double h = 1e-7;
    const Complex near = h * zeta_eval(w, MorseBott::standard(2, 2), h).value;
    CHECK(std::abs(near - table.at(0)) < 1e-5);
    const Complex near2 = h * zeta_eval(w, MorseBott::standard(2, 2), 2.0 + h).value;
    CHECK(std::abs(near2 - table.at(2)) < 1e-5);
  }
  {
    for (const auto& [k, r] : pole_table(standard_example(0))) CHECK(k <= -2);
  }
}

TEST_CASE("expansion of the standard example") {
  const auto ex = expansion(standard_example(), MorseBott::standard(2, 2));
  CHECK(ex.divergent.empty());
  CHECK(ex.log_coeff.real() == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(std::abs(ex.finite_part - 2 * kPi * window_finite_part()) < 1e-10);
  CHECK(ex.engine == Engine::Mellin);

  // Odd codimension: I_0 = 0.
  ProblemGenerator gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const SingularForm w = gen.top_form(Layout::single(3, 1), gen.uniform_int(1, 4), 3);
    CHECK(std::abs(expansion(w, MorseBott::standard(3, 1)).log_coeff) < 1e-12);
  }

  // Constant conformal factor shifts I_finite by c I_0.
  const double c = 0.3;
  const auto moved = expansion(standard_example(), MorseBott(2, Polynomial::constant(2, c)));
  CHECK(std::abs(moved.finite_part - ex.finite_part - c * ex.log_coeff) < 1e-12);
}

TEST_CASE("conformal residue independence and finite-part law") {
  ProblemGenerator gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const SingularForm w = gen.top_form(Layout::single(n, 2), gen.uniform_int(1, 3), 2);
    const Polynomial phi = gen.phi(n, 2);
    const auto a = expansion(w, MorseBott(2, phi));
    const auto b = expansion(w, MorseBott::standard(n, 2));
    CHECK(std::abs(a.log_coeff - b.log_coeff) < 1e-10);
    const auto law = expansion(phi * w, MorseBott::standard(n, 2)).log_coeff;
    CHECK(std::abs(a.finite_part - b.finite_part - law) < 1e-8);
  }
}

TEST_CASE("exact forms") {
  ProblemGenerator gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const int m = gen.uniform_int(1, n);
    const Layout L = Layout::single(n, m);
    const int N = gen.uniform_int(0, 3);
    const SingularForm psi = gen.singular_form(L, N, n - 1, 3);
    const SingularForm dpsi = exterior_derivative(psi);
    const auto mu0 = MorseBott::standard(n, m);
    const auto ex = expansion(dpsi, mu0);
    CHECK(std::abs(ex.log_coeff) < 1e-9);
    // zeta(s; d psi) = -s zeta(s; theta ^ psi) with theta = d mu_0 / 2 mu_0.
    const SingularForm theta_psi(N + 1, wedge(d_mu(L), psi.numerator()) * Complex(0.5));
    CHECK(std::abs(ex.finite_part + expansion(theta_psi, mu0).log_coeff) < 1e-8);
    if (n % 2 == 0) {
      const SingularForm psi_theta(N + 1, wedge(psi.numerator(), d_mu(L)) * Complex(0.5));
      CHECK(std::abs(ex.finite_part - expansion(psi_theta, mu0).log_coeff) < 1e-8);
    }
  }
}

TEST_CASE("I_0 is a current: morphism property") {
  ProblemGenerator gen(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const Layout L = Layout::single(n, 2);
    const int p = gen.uniform_int(0, n - 1);
    const SingularForm w = gen.singular_form(L, gen.uniform_int(1, 2), p, 2);
    const Form phi = gen.form(L, n - p - 1, 2, {});
    const auto mu0 = MorseBott::standard(n, 2);
    const Complex lhs = expansion(wedge(exterior_derivative(w), phi), mu0).log_coeff;
    const double sign = (p + 1) % 2 == 0 ? 1.0 : -1.0;
    const Complex rhs = sign * expansion(wedge(w, exterior_derivative(phi)), mu0).log_coeff;
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("Mellin relation against the numeric level-set integral") {
  ProblemGenerator gen(51);
  for (int trial = 0; trial < 3; ++trial) {
    const SingularForm w = gen.top_form(Layout::single(3, 2), gen.uniform_int(1, 2), 2);
    for (double s : {3.0, 4.5}) {
      const Complex z = zeta_eval(w, MorseBott::standard(3, 2), s).value;
      CHECK(std::abs(z - mellin_of_level_set(w, s)) < 1e-6 * std::max(1.0, std::abs(z)));
    }
  }
}
