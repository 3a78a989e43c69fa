#include <doctest.h>

#include "finpart/mellin.hpp"
#include "finpart/residue.hpp"
#include "test_support.hpp"

using namespace finpart;
using namespace finpart::test;

namespace {

Complex scalar_value(const ResidueForm& R) {
  if (R.form.is_zero()) return 0.0;
  REQUIRE(R.form.terms().size() == 1);
  const auto& [key, p] = *R.form.terms().begin();
  CHECK(key.frame == 0);
  return p.coefficient(MultiIndex::zero(R.form.dimension()));
}

}  // namespace

TEST_CASE("tameness examples") {
  CHECK(tame_check(canonical_alpha(2, 2)).tame);
  CHECK(tame_check(canonical_beta(2, 2)).tame);
  CHECK(tame_check(canonical_beta(4, 5)).tame);
  const Layout L = Layout::single(2, 2);
  const TameReport bad = tame_check(SingularForm(1, Form::differential(L, 0)));
  CHECK_FALSE(bad.tame);
  CHECK_FALSE(bad.reason.empty());
  CHECK_FALSE(bad.obstruction.is_zero());
  CHECK_THROWS_AS(tame_check(canonical_alpha(3, 3)), InvalidArgument);
}

TEST_CASE("d preserves tameness") {
  ProblemGenerator gen(101);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = trial % 4 == 3 ? 4 : 2;
    const int n = gen.uniform_int(m, m + 2);
    const auto w = gen.tame_form(n, m, gen.uniform_int(0, n - 1), 2);
    if (!tame_check(w).tame || !tame_check(exterior_derivative(w)).tame) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("decomposition of tame forms") {
  const int n = 3;
  const Layout L = Layout::single(n, 2);
  const WindowProduct w = ProblemGenerator::support_windows(L);
  {
    const SingularForm v(1, term(L, {0, 1, 2}, one(n), w));
    const TameDecomposition d = varia_decompose(v);
    CHECK(d.alpha == term(L, {2}, one(n), w));
    CHECK(d.correction.empty());
    CHECK(same(d.reconstruct(), mu_polynomial(L) * v));
  }
  {
    // beta ^ dx_3 = (x_1 dx_2 - x_2 dx_1) ^ dx_3 / mu_0.
    const Form num = x(n, 0) * term(L, {1, 2}, one(n), w) - x(n, 1) * term(L, {0, 2}, one(n), w);
    const SingularForm v(1, num);
    REQUIRE(tame_check(v).tame);
    const TameDecomposition d = varia_decompose(v);
    CHECK(d.alpha.is_zero());
    CHECK(d.correction.size() == 2);
    CHECK(same(d.reconstruct(), mu_polynomial(L) * v));
  }
  ProblemGenerator gen(102);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = trial % 4 == 3 ? 4 : 2;
    const int nn = gen.uniform_int(m, m + 2);
    const auto v = gen.tame_form(nn, m, gen.uniform_int(m, nn), 2);
    const auto d = varia_decompose(v);
    Polynomial mu_r = one(nn);
    for (int k = 0; k < m / 2; ++k) mu_r = mu_r * mu_polynomial(v.layout());
    if (!same(d.reconstruct(), mu_r * v)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("residue map examples") {
  CHECK(residue_constant(2) == doctest::Approx(2 * kPi));
  CHECK(residue_constant(4) == doctest::Approx(2 * kPi * kPi));
  const auto R2 = residue_map(SingularForm(1, volume(Layout::single(2, 2), one(2))));
  CHECK(std::abs(scalar_value(R2) - 2 * kPi) < 1e-14);
  const auto R4 = residue_map(SingularForm(2, volume(Layout::single(4, 4), one(4))));
  CHECK(std::abs(scalar_value(R4) - 2 * kPi * kPi) < 1e-13);
  CHECK(R4.codim == 4);
  CHECK_THROWS_AS(residue_map(SingularForm(1, Form::differential(Layout::single(2, 2), 0))), InvalidArgument);
}

TEST_CASE("residue map is a chain map and linear over functions") {
  ProblemGenerator gen(103);
  int chain_failures = 0;
  int linear_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = trial % 4 == 3 ? 4 : 2;
    const int n = gen.uniform_int(m, m + 2);
    const auto w = gen.tame_form(n, m, gen.uniform_int(m - 1, n - 1), 2);
    const Form lhs = residue_map(exterior_derivative(w)).form;
    const Form rhs = exterior_derivative(residue_map(w).form) * Complex(m % 2 == 0 ? 1.0 : -1.0);
    if (!(lhs - rhs).is_zero()) ++chain_failures;

    const Polynomial f = gen.polynomial(n, 2, 3);
    const std::vector<int> normal = Layout::single(n, m).normal_coords();
    const Form scaled = residue_map(f * w).form;
    if (!(scaled - f.substitute_zero(normal) * residue_map(w).form).is_zero()) ++linear_failures;
  }
  CHECK(chain_failures == 0);
  CHECK(linear_failures == 0);
}

TEST_CASE("complex hypersurface residue") {
  const Layout L = Layout::single(2, 2);
  const Form zero(L);
  const Form unit = Form::scalar(L, one(2));
  {
    const auto R = residue_complex(unit, zero, zero, zero);
    CHECK(std::abs(scalar_value(R) - Complex(0.0, -4 * kPi)) < 1e-14);
    const SingularForm real = bilogarithmic_form(unit, zero, zero, zero);
    CHECK(same(real, SingularForm(1, term(L, {0, 1}, Polynomial::constant(2, Complex(0.0, -2.0)), {}))));
    CHECK(std::abs(scalar_value(residue_map(real)) - Complex(0.0, -4 * kPi)) < 1e-14);
  }
  CHECK(residue_complex(zero, zero, zero, zero).form.is_zero());
  {
    const Polynomial z = x(2, 0) + x(2, 1) * Complex(0.0, 1.0);
    CHECK(residue_complex(Form::scalar(L, z * (one(2) + x(2, 0))), zero, zero, zero).form.is_zero());
  }
  ProblemGenerator gen(104);
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const Layout LL = Layout::single(n, 2);
    const WindowProduct w = ProblemGenerator::support_windows(LL);
    const int k = gen.uniform_int(0, n - 2);
    const Form w11 = gen.form(LL, k, 2, w);
    const Form w10 = gen.form(LL, k + 1, 2, w);
    const Form w01 = gen.form(LL, k + 1, 2, w);
    const Form w00 = k + 2 <= n ? gen.form(LL, k + 2, 2, w) : Form(LL);
    const Form a = residue_map(bilogarithmic_form(w11, w10, w01, w00)).form;
    const Form b = residue_complex(w11, w10, w01, w00).form;
    if (!(a - b).is_zero()) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("pairing on Y") {
  const Layout L = Layout::single(2, 2);
  const auto R = residue_map(SingularForm(1, volume(L, one(2))));
  const Form phi = Form::scalar(L, one(2), windows({radial()}));
  CHECK(std::abs(pair_on_Y(R, phi) - 2 * kPi) < 1e-14);
  CHECK(std::abs(pair_on_Y(R, Form::scalar(L, x(2, 0)))) == 0.0);
  CHECK(pair_on_Y(R, Form::differential(L, 0)) == Complex(0.0));
  const Layout L3 = Layout::single(3, 2);
  const auto R3 = residue_map(SingularForm(1, term(L3, {0, 1}, one(3), ProblemGenerator::support_windows(L3))));
  CHECK_THROWS_AS(pair_on_Y(R3, Form::scalar(L3, one(3))), InvalidArgument);

  ProblemGenerator gen(105);
  const std::pair<int, int> shapes[] = {{2, 2}, {3, 2}, {4, 2}, {4, 4}};
  double worst = 0.0;
  int nonzero = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto [n, m] = shapes[trial % 4];
    const int deg = gen.uniform_int(m, n);
    const auto w = gen.tame_form(n, m, deg, 2);
    const Form test = gen.form(w.layout(), n - deg, 2, {}, 4);
    const Complex lhs = expansion(wedge(w, test), MorseBott::standard(n, m)).log_coeff;
    const Complex rhs = pair_on_Y(residue_map(w), test);
    worst = std::max(worst, std::abs(lhs - rhs));
    if (std::abs(rhs) > 1e-6) ++nonzero;
  }
  CHECK(worst < 1e-8);
  CHECK(nonzero > 25);
}
