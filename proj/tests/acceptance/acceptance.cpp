#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "finpart/cutoff.hpp"
#include "finpart/mellin.hpp"
#include "finpart/multi.hpp"
#include "finpart/residue.hpp"
#include "test_support.hpp"

using namespace finpart;
using namespace finpart::test;

namespace {

// Measured quantities of one criterion; every entry must pass.
struct Outcome {
  std::vector<std::string> failures;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  // |a - b| <= tol, recording the worst error under `label`.
  void close(const std::string& label, Complex a, Complex b, double tol) {
    const double err = std::abs(a - b);
    auto& worst = errors[label];
    worst = std::max(worst, err);
    if (!(err <= tol)) {
      std::ostringstream s;
      s << label << ": |" << a << " - " << b << "| = " << err << " > " << tol;
      failures.push_back(s.str());
    }
  }
  std::map<std::string, double> errors;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds, 0 for none
  std::function<void(Outcome&)> body;
};

// Random top form plus (1 + mu_0^{N-1}) times the volume form, so that the
// leading pole and I_0 do not vanish by parity.
SingularForm nontrivial_top(ProblemGenerator& gen, const Layout& L, int N) {
  const SingularForm w = gen.top_form(L, N, 2);
  Polynomial p = one(L.dimension());
  for (int k = 1; k < N; ++k) p = p * mu_polynomial(L);
  return w + SingularForm(N, volume(L, one(L.dimension()) + p));
}

SingularForm scalar_model(int m, const Polynomial& p) {
  return SingularForm(m / 2, volume(Layout::single(m, m), p));
}

void c1(Outcome& o) {
  const SingularForm w(1, volume(Layout::single(2, 2), one(2)));
  const auto mu0 = MorseBott::standard(2, 2);
  const auto mellin = expansion(w, mu0);
  const auto fit = cutoff_expansion(w, mu0).expansion;
  const double finite = 2 * kPi * window_finite_part();
  o.close("I_0 mellin", mellin.log_coeff, 2 * kPi, 1e-8);
  o.close("I_0 cutoff", fit.log_coeff, 2 * kPi, 1e-4);
  o.close("I_finite mellin", mellin.finite_part, finite, 1e-8);
  o.close("I_finite cutoff", fit.finite_part, finite, 1e-4);
}

void c2(Outcome& o) {
  for (int m : {2, 4}) {
    const SingularForm w = scalar_model(m, one(m));
    const Complex i0 = expansion(w, MorseBott::standard(m, m)).log_coeff;
    const double area = 2 * std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0);
    const Complex paired = pair_on_Y(residue_map(w), Form::scalar(w.layout(), one(m)));
    o.close("I_0 vs sphere area, m = " + std::to_string(m), i0, area, 1e-8);
    o.close("I_0 vs pairing, m = " + std::to_string(m), i0, paired, 1e-8);
  }
}

// Shared battery for the conformal criteria 3 and 4.
struct ConformalCase {
  Complex moved_log, mellin_log, finite_difference, law;
};

const std::vector<ConformalCase>& conformal_battery() {
  static const std::vector<ConformalCase> cases = [] {
    std::vector<ConformalCase> out;
    ProblemGenerator gen(4001);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = gen.uniform_int(2, 4);
      const int N = gen.uniform_int(1, 3);
      const Layout L = Layout::single(n, 2);
      const SingularForm w = nontrivial_top(gen, L, N);
      const Polynomial phi = gen.phi(n, 2);
      const auto mu0 = MorseBott::standard(n, 2);
      const auto moved = cutoff_expansion(w, MorseBott(2, phi)).expansion;
      const auto fixed = cutoff_expansion(w, mu0).expansion;
      out.push_back({moved.log_coeff, expansion(w, mu0).log_coeff, moved.finite_part - fixed.finite_part,
                     expansion(phi * w, mu0).log_coeff});
    }
    return out;
  }();
  return cases;
}

void c3(Outcome& o) {
  int nonzero = 0;
  for (const auto& c : conformal_battery()) {
    o.close("I_0(e^{2 phi} mu_0) vs I_0(mu_0)", c.moved_log, c.mellin_log, 1e-4);
    nonzero += std::abs(c.mellin_log) > 1e-6 ? 1 : 0;
  }
  o.detail << nonzero << " of 20 with I_0 != 0";
}

void c4(Outcome& o) {
  int nonzero = 0;
  for (const auto& c : conformal_battery()) {
    o.close("finite-part law", c.finite_difference, c.law, 1e-4);
    nonzero += std::abs(c.law) > 1e-6 ? 1 : 0;
  }
  o.detail << nonzero << " of 20 with a nonzero shift";
}

void c5(Outcome& o) {
  ProblemGenerator gen(5001);
  const int n = 3;
  const SingularForm w = nontrivial_top(gen, Layout::single(n, 2), 2);
  const ZetaEvaluator base(w, MorseBott::standard(n, 2));
  MellinOptions series;
  series.split_constant = false;
  for (double t : {2.0, 4.0}) {
    const ZetaEvaluator scaled(w, MorseBott(2, Polynomial::constant(n, 0.5 * std::log(t))), series);
    for (int i = 0; i < 10; ++i) {
      const Complex s(gen.uniform_real(-1.5, 2.5), gen.uniform_real(0.25, 2.0));
      const Complex rhs = std::pow(t, s / 2.0) * base.evaluate(s).value;
      o.require(std::abs(rhs) > 1e-6, "zeta vanishes at a sample point");
      o.close("zeta(s; t mu_0) vs t^{s/2} zeta(s; mu_0) (relative)", scaled.evaluate(s).value / std::max(1.0, std::abs(rhs)),
              rhs / std::max(1.0, std::abs(rhs)), 1e-10);
    }
  }
}

void c6(Outcome& o) {
  ProblemGenerator gen(6001);
  int accepted = 0;
  int odd = 0;
  for (int attempt = 0; accepted < 20 && attempt < 5000; ++attempt) {
    const int n = gen.uniform_int(2, 4);
    const int m = gen.uniform_int(1, n);
    const int N = gen.uniform_int(1, 2);
    const Layout L = Layout::single(n, m);
    const SingularForm psi = gen.singular_form(L, N, n - 1, 3);
    const auto mu0 = MorseBott::standard(n, m);
    // zeta(s; d psi) = -s zeta(s; theta ^ psi), theta = d mu_0 / 2 mu_0; for
    // even n this is I_0(psi ^ theta).
    const Complex rhs = -expansion(SingularForm(N + 1, wedge(d_mu(L), psi.numerator()) * Complex(0.5)), mu0).log_coeff;
    if (std::abs(rhs) < 1e-6) continue;
    ++accepted;
    odd += n % 2;
    const auto ex = expansion(exterior_derivative(psi), mu0);
    o.close("I_0(d psi)", ex.log_coeff, 0.0, 1e-9);
    o.close("I_finite(d psi) vs -I_0(theta ^ psi)", ex.finite_part, rhs, 1e-8);
    if (n % 2 == 0)
      o.close("I_finite(d psi) vs I_0(psi ^ theta), even n", ex.finite_part,
              expansion(SingularForm(N + 1, wedge(psi.numerator(), d_mu(L)) * Complex(0.5)), mu0).log_coeff, 1e-8);
  }
  o.require(accepted == 20, "fewer than 20 nontrivial exact forms generated");
  o.detail << accepted << " nontrivial psi, " << odd << " with odd n";
}

void c7(Outcome& o) {
  ProblemGenerator gen(7001);
  for (int m : {2, 3}) {
    for (int trial = 0; trial < 3; ++trial) {
      const int n = m + trial % 2;
      const SingularForm w = nontrivial_top(gen, Layout::single(n, m), gen.uniform_int(1, 2));
      const auto mu0 = MorseBott::standard(n, m);
      const double t = gen.uniform_real(0.1, 0.8);
      const Complex plus = level_set_integral_numeric(w, mu0, t);
      const Complex minus = level_set_integral_numeric(w, mu0, -t);
      o.require(std::abs(plus) > 1e-6, "level-set integral vanishes");
      const double sign = m % 2 == 0 ? 1.0 : -1.0;
      o.close("I(-t) vs (-1)^m I(t), m = " + std::to_string(m) + " (relative)", minus / std::max(1.0, std::abs(plus)),
              sign * plus / std::max(1.0, std::abs(plus)), 1e-10);
    }
  }
}

void c8(Outcome& o) {
  ProblemGenerator gen(8001);
  int chain = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = trial % 4 == 3 ? 4 : 2;
    const int n = gen.uniform_int(m, m + 2);
    const auto w = gen.tame_form(n, m, gen.uniform_int(m - 1, n - 1), 2);
    const Form lhs = residue_map(exterior_derivative(w)).form;
    const Form rhs = exterior_derivative(residue_map(w).form) * Complex(m % 2 == 0 ? 1.0 : -1.0);
    if (!(lhs - rhs).is_zero()) ++chain;
  }
  o.require(chain == 0, std::to_string(chain) + " of 100 chain-map identities are not symbolically zero");
  int complex_mismatch = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const Layout L = Layout::single(n, 2);
    const WindowProduct w = ProblemGenerator::support_windows(L);
    const int k = gen.uniform_int(0, n - 2);
    const Form w11 = gen.form(L, k, 2, w);
    const Form w10 = gen.form(L, k + 1, 2, w);
    const Form w01 = gen.form(L, k + 1, 2, w);
    const Form w00 = k + 2 <= n ? gen.form(L, k + 2, 2, w) : Form(L);
    if (!(residue_map(bilogarithmic_form(w11, w10, w01, w00)).form - residue_complex(w11, w10, w01, w00).form)
             .is_zero())
      ++complex_mismatch;
  }
  o.require(complex_mismatch == 0,
            std::to_string(complex_mismatch) + " of 50 complex residues differ from the real residue map");
  o.detail << "100 chain-map and 50 complex-residue identities checked symbolically";
}

void c9(Outcome& o) {
  const Layout L(4, {Block{0, 2}, Block{2, 2}});
  const CrossingProblem p(SingularForm(std::vector<int>{1, 1}, volume(L, one(4))));
  const auto ex = multi_expansion(p);
  o.close("I_{0,0}", ex.coefficients.at(0), 4 * kPi * kPi, 1e-8);
  ProblemGenerator gen(9001);
  for (int trial = 0; trial < 3; ++trial) {
    const std::vector<Polynomial> phis{gen.phi(4, 2), gen.phi(4, 2)};
    for (const auto& c : crossing_conformal_check(p, phis).checks) o.close("crossing laws", c.lhs, c.rhs, 1e-6);
  }
}

void c10(Outcome& o) {
  ProblemGenerator gen(10001);
  const Layout L = Layout::single(2, 1);
  for (int M = 1; M <= 4; ++M) {
    const BoundaryProblem p{volume(L, one(2) + x(2, 0) * gen.polynomial(2, 3, 5)), M, Polynomial(2)};
    std::set<int> table;
    for (const auto& [k, r] : boundary_poles(p)) table.insert(k);
    // Numerical detection: delta * zeta(k + delta) stays finite only at poles.
    std::set<int> detected;
    const double delta = 1e-5;
    for (int k = M - 6; k <= M + 2; ++k) {
      bool pole = false;
      try {
        const Complex a = delta * boundary_zeta(p, k + delta).value;
        const Complex b = -delta * boundary_zeta(p, k - delta).value;
        pole = std::abs(a) > 1e-8 && std::abs(a - b) < 1e-3 * std::abs(a);
      } catch (const PoleError&) {
        pole = true;
      }
      if (pole) detected.insert(k);
    }
    o.require(!table.empty() && *table.rbegin() == M - 1, "leading pole not at M - 1 for M = " + std::to_string(M));
    for (int k : table) o.require(k <= M - 1, "pole above M - 1");
    std::set<int> in_range;
    for (int k : table)
      if (k >= M - 6) in_range.insert(k);
    o.require(detected == in_range, "numerically detected poles differ from the table for M = " + std::to_string(M));

    const Polynomial phi = gen.phi(2, 2);
    const auto moved = boundary_cutoff_expansion(BoundaryProblem{p.numerator, M, phi}).expansion;
    o.close("I_0 independence under lambda -> e^phi lambda", moved.log_coeff, boundary_expansion(p).log_coeff, 1e-6);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Form num = volume(L, one(2) + gen.polynomial(2, 3, 3, 1.0, {1}));
    const Form test = Form::scalar(L, one(2) + gen.polynomial(2, 2, 3));
    const Complex lhs = boundary_expansion(BoundaryProblem{wedge(num, test), 1, Polynomial(2)}).log_coeff;
    o.close("boundary pairing", lhs, pair_on_Y(boundary_residue(num, 1), test), 1e-8);
  }
}

void c11(Outcome& o) {
  ProblemGenerator gen(11001);
  const std::pair<int, int> shapes[] = {{1, 1}, {2, 1}, {3, 3}, {4, 3}};
  for (const auto& [n, m] : shapes) {
    const SingularForm w = gen.top_form(Layout::single(n, m), m == 1 ? 1 : 2, 2);
    const auto mu0 = MorseBott::standard(n, m);
    o.close("|I_0|, m = " + std::to_string(m), expansion(w, mu0).log_coeff, 0.0, 1e-9);
    const auto a = cutoff_expansion(w, MorseBott(m, gen.phi(n, 2))).expansion;
    const auto b = cutoff_expansion(w, MorseBott(m, gen.phi(n, 2))).expansion;
    o.close("I_finite across conformal factors, m = " + std::to_string(m), a.finite_part, b.finite_part, 1e-4);
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "logarithmic model", 1.0, c1},
      {2, "sphere-area family and pairing", 5.0, c2},
      {3, "conformal invariance of I_0", 0.0, c3},
      {4, "conformal law for the finite part", 0.0, c4},
      {5, "homogeneity", 0.0, c5},
      {6, "exactness", 0.0, c6},
      {7, "parity of level-set integrals", 0.0, c7},
      {8, "residue chain map and complex residue", 0.0, c8},
      {9, "normal crossings", 30.0, c9},
      {10, "boundary battery", 10.0, c10},
      {11, "odd codimension", 0.0, c11},
  };
  int failed = 0;
  double conformal_seconds = 0.0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // Criteria 3 and 4 share one battery and one time budget.
    double limit = c.time_limit;
    if (c.id == 3 || c.id == 4) {
      conformal_seconds += seconds;
      if (c.id == 4 && conformal_seconds > 60.0) o.failures.push_back("battery exceeded 60 s");
    }
    if (limit > 0.0 && seconds > limit) {
      std::ostringstream s;
      s << "runtime " << seconds << " s exceeds " << limit << " s";
      o.failures.push_back(s.str());
    }
    const bool pass = o.failures.empty();
    failed += pass ? 0 : 1;
    std::printf("%s criterion %2d: %s (%.2f s)", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds);
    std::vector<std::string> notes;
    if (!o.detail.str().empty()) notes.push_back(o.detail.str());
    for (const auto& [label, err] : o.errors) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2e", err);
      notes.push_back(label + " max err " + buf);
    }
    for (std::size_t i = 0; i < notes.size(); ++i)
      std::printf("%s%s", i == 0 ? " [" : "; ", notes[i].c_str());
    if (!notes.empty()) std::printf("]");
    std::printf("\n");
    for (const auto& f : o.failures) std::printf("    %s\n", f.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
