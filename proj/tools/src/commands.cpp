#include "finpart/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "finpart/cutoff.hpp"
#include "finpart/mellin.hpp"
#include "finpart/multi.hpp"
#include "finpart/random.hpp"
#include "finpart/residue.hpp"

namespace finpart::cli {

using nlohmann::json;

namespace {

json cj(Complex c) { return json::array({c.real(), c.imag()}); }

json window_json(const WindowFactor& f) {
  json j;
  if (f.arg == WindowFactor::Arg::Radial)
    j["radial"] = f.index + 1;
  else
    j["coordinate"] = f.index + 1;
  j["order"] = f.window.order;
  j["inner"] = f.window.inner;
  j["outer"] = f.window.outer;
  return j;
}

json form_json(const Form& form) {
  json terms = json::array();
  for (const auto& [key, poly] : form.terms()) {
    json frame = json::array();
    for (int i : frame_indices(key.frame)) frame.push_back(i + 1);
    json windows = json::array();
    for (const auto& w : key.windows) windows.push_back(window_json(w));
    for (const auto& [e, c] : poly.terms())
      terms.push_back({{"coefficient", cj(c)}, {"monomial", e.exponents}, {"frame", frame}, {"windows", windows}});
  }
  return terms;
}

json expansion_json(const AsymptoticExpansion& e) {
  json div = json::array();
  for (const auto& [k, v] : e.divergent) div.push_back({{"k", k}, {"value", cj(v)}});
  return {{"engine", to_string(e.engine)},
          {"divergent", div},
          {"log", cj(e.log_coeff)},
          {"finite", cj(e.finite_part)},
          {"error_estimate", e.error_estimate}};
}

json fit_json(const FitReport& f) {
  json j = expansion_json(f.expansion);
  j["residual_norm"] = f.residual_norm;
  j["condition_number"] = f.condition_number;
  return j;
}

json set_json(ComponentSet M, int c) {
  json a = json::array();
  for (int i = 0; i < c; ++i)
    if ((M >> i) & 1U) a.push_back(i + 1);
  return a;
}

// Everything a subcommand needs, with overrides applied.
struct Context {
  const ProblemSpec& spec;
  const RunOptions& options;
  std::string engine;
  double tolerance;
  std::uint64_t seed;
};

std::vector<Engine> engines_of(const std::string& name) {
  if (name == "mellin") return {Engine::Mellin};
  if (name == "cutoff") return {Engine::Cutoff};
  if (name == "both") return {Engine::Mellin, Engine::Cutoff};
  throw InvalidArgument("unknown engine '" + name + "'");
}

// ------------------------------------------------------------- subcommands

json finite_part(const Context& ctx) {
  const auto& spec = ctx.spec;
  json out = json::array();
  std::map<Engine, AsymptoticExpansion> got;
  for (Engine e : engines_of(ctx.engine)) {
    switch (spec.kind) {
      case ProblemKind::Single: {
        const auto sf = spec.singular_form();
        const auto mu = spec.morse_bott();
        if (e == Engine::Mellin) {
          got[e] = expansion(sf, mu);
          out.push_back(expansion_json(got[e]));
        } else {
          const auto fit = cutoff_expansion(sf, mu);
          got[e] = fit.expansion;
          out.push_back(fit_json(fit));
        }
        break;
      }
      case ProblemKind::Boundary: {
        const auto p = spec.boundary_problem();
        if (e == Engine::Mellin) {
          got[e] = boundary_expansion(p);
          out.push_back(expansion_json(got[e]));
        } else {
          const auto fit = boundary_cutoff_expansion(p);
          got[e] = fit.expansion;
          out.push_back(fit_json(fit));
        }
        break;
      }
      case ProblemKind::Crossing: {
        if (e == Engine::Cutoff) throw InvalidArgument("the cutoff engine is not available for crossing problems");
        const auto p = spec.crossing_problem();
        const auto ex = multi_expansion(p);
        json coeffs = json::array();
        for (const auto& [M, v] : ex.coefficients)
          coeffs.push_back({{"set", set_json(M, p.components())}, {"value", cj(v)}});
        out.push_back({{"engine", "mellin"}, {"coefficients", coeffs}, {"finite", cj(ex.finite_part)}});
        break;
      }
    }
  }
  json result = {{"expansions", out}};
  if (got.size() == 2) {
    const auto& a = got[Engine::Mellin];
    const auto& b = got[Engine::Cutoff];
    double div = 0.0;
    for (const auto& [k, v] : a.divergent) {
      auto it = b.divergent.find(k);
      div = std::max(div, std::abs(v - (it == b.divergent.end() ? Complex{} : it->second)));
    }
    result["comparison"] = {{"engines", {"mellin", "cutoff"}},
                            {"divergent_difference", div},
                            {"log_difference", std::abs(a.log_coeff - b.log_coeff)},
                            {"finite_difference", std::abs(a.finite_part - b.finite_part)}};
  }
  return result;
}

json zeta(const Context& ctx) {
  if (!ctx.options.s) throw InvalidArgument("zeta needs --s RE,IM");
  const Complex s = *ctx.options.s;
  const auto& spec = ctx.spec;
  json r = {{"engine", "mellin"}, {"s", cj(s)}};
  if (spec.kind == ProblemKind::Crossing) {
    const auto p = spec.crossing_problem();
    std::vector<Complex> sv(static_cast<std::size_t>(p.components()), s);
    r["value"] = cj(multi_zeta(p, sv));
    return r;
  }
  const ZetaValue z = spec.kind == ProblemKind::Single ? zeta_eval(spec.singular_form(), spec.morse_bott(), s)
                                                       : boundary_zeta(spec.boundary_problem(), s);
  r["value"] = cj(z.value);
  r["truncation"] = z.truncation;
  r["depth"] = z.depth;
  return r;
}

json poles(const Context& ctx) {
  const auto& spec = ctx.spec;
  if (spec.kind == ProblemKind::Crossing) throw InvalidArgument("poles are reported for single-component problems");
  const bool standard = spec.phi_polynomial().is_zero();
  json list = json::array();
  if (standard) {
    const auto table = spec.kind == ProblemKind::Single ? pole_table(spec.singular_form())
                                                        : boundary_poles(spec.boundary_problem());
    for (const auto& [k, res] : table) list.push_back({{"location", k}, {"residue", cj(res)}});
    return {{"engine", "mellin"}, {"range", "all"}, {"poles", list}};
  }
  const auto ex = spec.kind == ProblemKind::Single ? expansion(spec.singular_form(), spec.morse_bott())
                                                   : boundary_expansion(spec.boundary_problem());
  for (auto it = ex.divergent.rbegin(); it != ex.divergent.rend(); ++it)
    list.push_back({{"location", it->first}, {"residue", cj(static_cast<double>(it->first) * it->second)}});
  list.push_back({{"location", 0}, {"residue", cj(ex.log_coeff)}});
  return {{"engine", "mellin"}, {"range", "nonnegative"}, {"poles", list}};
}

json residue(const Context& ctx) {
  const auto& spec = ctx.spec;
  json r;
  ResidueForm R;
  Complex lhs;
  const auto test = spec.test_form_value();
  switch (spec.kind) {
    case ProblemKind::Crossing:
      throw InvalidArgument("the residue map is defined for a single component or a boundary");
    case ProblemKind::Single: {
      const auto sf = spec.singular_form();
      const TameReport tame = tame_check(sf);
      if (!tame.tame) throw InvalidArgument("form is not tame: " + tame.reason);
      R = residue_map(sf);
      r["constant"] = residue_constant(spec.codim);
      if (test) lhs = expansion(wedge(sf, *test), MorseBott::standard(spec.n, spec.codim)).log_coeff;
      break;
    }
    case ProblemKind::Boundary: {
      const auto p = spec.boundary_problem();
      const auto log = logarithmic_check(p.numerator, p.power);
      if (!log.logarithmic) throw InvalidArgument("form is not logarithmic: " + log.reason);
      R = boundary_residue(p.numerator, p.power);
      if (test) lhs = boundary_expansion(BoundaryProblem{wedge(p.numerator, *test), p.power, Polynomial(spec.n)}).log_coeff;
      break;
    }
  }
  r["engine"] = "symbolic";
  r["codim"] = R.codim;
  r["orientation"] = R.orientation;
  r["form"] = form_json(R.form);
  if (test) {
    const Complex rhs = pair_on_Y(R, *test);
    r["pairing"] = {{"integral_over_Y", {{"engine", "quadrature"}, {"value", cj(rhs)}}},
                    {"log_coefficient", {{"engine", "mellin"}, {"value", cj(lhs)}}},
                    {"difference", std::abs(lhs - rhs)}};
  }
  return r;
}

Complex profile_value(const RadialProfile& profile, double t) {
  Complex sum{};
  for (const auto& c : profile.components) {
    double w = 1.0;
    for (const Window& win : c.window) w *= win(t * t);
    Complex poly{};
    for (std::size_t j = c.coeffs.size(); j-- > 0;) poly = poly * t + c.coeffs[j];
    sum += w * std::pow(t, profile.shift) * poly;
  }
  return sum;
}

json level_set(const Context& ctx) {
  if (!ctx.options.t) throw InvalidArgument("level-set needs --t");
  const double t = *ctx.options.t;
  if (t == 0.0) throw InvalidArgument("level-set needs t != 0");
  const auto& spec = ctx.spec;
  json values = json::array();
  switch (spec.kind) {
    case ProblemKind::Crossing:
      throw InvalidArgument("level-set integrals are reported for single-component problems");
    case ProblemKind::Single: {
      const auto sf = spec.singular_form();
      const auto mu = spec.morse_bott();
      values.push_back({{"engine", "quadrature"}, {"value", cj(level_set_integral_numeric(sf, mu, t))}});
      if (mu.is_standard() && t > 0.0)
        values.push_back({{"engine", "profile"}, {"value", cj(profile_value(radial_profile(sf), t))}});
      break;
    }
    case ProblemKind::Boundary: {
      const auto p = spec.boundary_problem();
      values.push_back({{"engine", "quadrature"},
                        {"value", cj(level_set_integral_numeric(p.numerator, p.power, NormalGeometry::HalfLine,
                                                                p.phi, t))}});
      if (p.is_standard() && t > 0.0)
        values.push_back(
            {{"engine", "profile"},
             {"value", cj(profile_value(radial_profile(p.numerator, p.power, NormalGeometry::HalfLine), t))}});
      break;
    }
  }
  return {{"t", t}, {"values", values}};
}

json cutoff(const Context& ctx) {
  if (!ctx.options.eps) throw InvalidArgument("cutoff needs --eps");
  const double eps = *ctx.options.eps;
  const auto& spec = ctx.spec;
  if (!(eps > 0.0 && eps < spec.inner)) throw InvalidArgument("cutoff needs 0 < eps < inner window radius");
  Complex value;
  AsymptoticExpansion ex;
  switch (spec.kind) {
    case ProblemKind::Crossing:
      throw InvalidArgument("cutoff integrals are reported for single-component problems");
    case ProblemKind::Single:
      value = cutoff_integral(spec.singular_form(), spec.morse_bott(), eps);
      ex = expansion(spec.singular_form(), spec.morse_bott());
      break;
    case ProblemKind::Boundary: {
      const auto p = spec.boundary_problem();
      const double e[] = {eps};
      value = cutoff_samples(p.numerator, p.power, NormalGeometry::HalfLine, p.phi, e).at(0);
      ex = boundary_expansion(p);
      break;
    }
  }
  Complex asym = ex.log_coeff * std::log(1.0 / eps) + ex.finite_part;
  for (const auto& [k, v] : ex.divergent) asym += v * std::pow(eps, -k);
  return {{"eps", eps},
          {"value", {{"engine", "cutoff"}, {"value", cj(value)}}},
          {"expansion_without_remainder", {{"engine", "mellin"}, {"value", cj(asym)}}}};
}

// ------------------------------------------------------------------- checks

struct Verdict {
  std::string name;
  std::string tag;
  Complex lhs;
  Complex rhs;
  std::string lhs_engine;
  std::string rhs_engine;
};

struct CheckOutcome {
  std::vector<Verdict> verdicts;
  json notes = json::object();
};

std::uint64_t check_seed(std::uint64_t seed, int salt) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(salt));
}

const ProblemSpec& single(const Context& ctx, const std::string& check) {
  if (ctx.spec.kind != ProblemKind::Single)
    throw InvalidArgument("check " + check + " needs a problem with a single normal block (field 'codim')");
  return ctx.spec;
}

CheckOutcome check_conformal(const Context& ctx) {
  const auto& spec = single(ctx, "conformal");
  ProblemGenerator gen(check_seed(ctx.seed, 1));
  CheckOutcome out;
  Polynomial phi = spec.phi_polynomial();
  out.notes["phi_source"] = phi.is_zero() ? "seed" : "spec";
  if (phi.is_zero()) phi = gen.phi(spec.n, 2);
  const auto sf = spec.singular_form();
  const auto standard = MorseBott::standard(spec.n, spec.codim);
  const auto moved = cutoff_expansion(sf, MorseBott(spec.codim, phi)).expansion;
  const auto fixed = cutoff_expansion(sf, standard).expansion;
  const auto mellin = expansion(sf, standard);
  const auto phi_omega = expansion(phi * sf, standard);
  out.verdicts.push_back({"I_0(exp(2 phi) mu_0, omega) = I_0(mu_0, omega)", "t-01iii", moved.log_coeff,
                          mellin.log_coeff, "cutoff", "mellin"});
  out.verdicts.push_back({"I_finite(exp(2 phi) mu_0) - I_finite(mu_0) = res_0 zeta(s; mu_0, phi omega)", "t-02",
                          moved.finite_part - fixed.finite_part, phi_omega.log_coeff, "cutoff", "mellin"});
  return out;
}

CheckOutcome check_exact(const Context& ctx) {
  const auto& spec = single(ctx, "exact");
  ProblemGenerator gen(check_seed(ctx.seed, 2));
  const Layout layout = spec.layout();
  const int N = spec.powers.at(0);
  const auto mu0 = MorseBott::standard(spec.n, spec.codim);
  // Prefer a psi for which both sides are nonzero.
  const auto theta_psi = [&](const SingularForm& p) {
    return expansion(SingularForm(N + 1, wedge(d_mu(layout), p.numerator()) * Complex(-0.5)), mu0);
  };
  SingularForm psi;
  for (int attempt = 0; attempt < 200; ++attempt) {
    psi = gen.singular_form(layout, N, spec.n - 1, 3);
    if (!exterior_derivative(psi).is_zero() && std::abs(theta_psi(psi).log_coeff) > 1e-6) break;
  }
  if (exterior_derivative(psi).is_zero()) throw NumericalFailure("no primitive psi with nonzero d psi found");
  const auto rhs = theta_psi(psi);
  const auto ex = expansion(exterior_derivative(psi), mu0);
  CheckOutcome out;
  out.notes["psi_power"] = N;
  out.verdicts.push_back({"I_0(mu_0, d psi) = 0", "pr-02", ex.log_coeff, 0.0, "mellin", "exact"});
  out.verdicts.push_back({"I_finite(mu_0, d psi) = -I_0(mu_0, d mu_0 / 2 mu_0 ^ psi)", "pr-02", ex.finite_part,
                          rhs.log_coeff, "mellin", "mellin"});
  return out;
}

CheckOutcome check_residue(const Context& ctx) {
  const auto& spec = single(ctx, "residue");
  if (spec.codim % 2 != 0) throw InvalidArgument("check residue needs an even codimension");
  const auto sf = spec.singular_form();
  const TameReport tame = tame_check(sf);
  if (!tame.tame) throw InvalidArgument("check residue needs a tame form: " + tame.reason);
  ProblemGenerator gen(check_seed(ctx.seed, 3));
  CheckOutcome out;
  auto test = spec.test_form_value();
  out.notes["test_form_source"] = test ? "spec" : "seed";
  if (!test) {
    const int degree = spec.n - sf.degree();
    do {
      test = gen.form(spec.layout(), degree, 2, {}, 4);
    } while (test->is_zero());
  }
  const Complex lhs = expansion(wedge(sf, *test), MorseBott::standard(spec.n, spec.codim)).log_coeff;
  const Complex rhs = pair_on_Y(residue_map(sf), *test);
  out.verdicts.push_back({"I_0(omega ^ phi) = int_Y R(omega) ^ phi", "t-04", lhs, rhs, "mellin", "quadrature"});
  return out;
}

CheckOutcome check_homogeneity(const Context& ctx) {
  const auto& spec = single(ctx, "homogeneity");
  ProblemGenerator gen(check_seed(ctx.seed, 4));
  const auto sf = spec.singular_form();
  const auto mu0 = MorseBott::standard(spec.n, spec.codim);
  MellinOptions series;
  series.split_constant = false;
  const ZetaEvaluator base(sf, mu0);
  const double ts[] = {2.0, 4.0};
  std::vector<std::pair<double, ZetaEvaluator>> scaled;
  for (double t : ts)
    scaled.emplace_back(t, ZetaEvaluator(sf, MorseBott(spec.codim, Polynomial::constant(spec.n, 0.5 * std::log(t))),
                                         series));
  CheckOutcome out;
  for (int i = 0; i < 10; ++i) {
    const double im = gen.uniform_real(0.25, 2.0) * (gen.uniform_int(0, 1) == 0 ? 1.0 : -1.0);
    const Complex s(gen.uniform_real(-1.5, 2.5), im);
    const auto& [t, z] = scaled[static_cast<std::size_t>(i % 2)];
    std::ostringstream name;
    name << "zeta(s; " << t << " mu_0) = " << t << "^(s/2) zeta(s; mu_0), s = " << s.real() << (im < 0 ? "" : "+")
         << s.imag() << "i";
    out.verdicts.push_back({name.str(), "t-01-cor", z.evaluate(s).value, std::pow(t, s / 2.0) * base.evaluate(s).value,
                            "mellin-series", "mellin"});
  }
  return out;
}

CheckOutcome check_parity(const Context& ctx) {
  const auto& spec = single(ctx, "parity");
  ProblemGenerator gen(check_seed(ctx.seed, 5));
  const auto sf = spec.singular_form();
  const auto mu0 = MorseBott::standard(spec.n, spec.codim);
  const double sign = spec.codim % 2 == 0 ? 1.0 : -1.0;
  CheckOutcome out;
  for (int i = 0; i < 3; ++i) {
    const double t = gen.uniform_real(0.1, 0.9) * spec.outer;
    std::ostringstream name;
    name << "I(-t) = (-1)^m I(t), t = " << t;
    out.verdicts.push_back({name.str(), "ss-2.2", level_set_integral_numeric(sf, mu0, -t),
                            sign * level_set_integral_numeric(sf, mu0, t), "quadrature", "quadrature"});
  }
  return out;
}

CheckOutcome check_crossing(const Context& ctx) {
  const auto& spec = ctx.spec;
  if (spec.kind != ProblemKind::Crossing) throw InvalidArgument("check crossing needs a problem with 'blocks'");
  ProblemGenerator gen(check_seed(ctx.seed, 6));
  const auto p = spec.crossing_problem();
  std::vector<Polynomial> phis = spec.phi_polynomials();
  const bool given = std::any_of(phis.begin(), phis.end(), [](const Polynomial& q) { return !q.is_zero(); });
  CheckOutcome out;
  out.notes["phi_source"] = given ? "spec" : "seed";
  if (!given) {
    phis.clear();
    for (int i = 0; i < p.components(); ++i) phis.push_back(gen.phi(spec.n, 2));
  }
  const auto rep = crossing_conformal_check(p.standard(), phis);
  for (const auto& c : rep.checks) out.verdicts.push_back({c.law, "t-06", c.lhs, c.rhs, "contour", "mellin"});
  return out;
}

CheckOutcome check_boundary(const Context& ctx) {
  const auto& spec = ctx.spec;
  if (spec.kind != ProblemKind::Boundary) throw InvalidArgument("check boundary needs a problem with 'boundary: true'");
  ProblemGenerator gen(check_seed(ctx.seed, 7));
  const auto p = spec.boundary_problem();
  CheckOutcome out;
  Polynomial phi = p.phi;
  out.notes["phi_source"] = phi.is_zero() ? "seed" : "spec";
  if (phi.is_zero()) phi = gen.phi(spec.n, 2);
  const BoundaryProblem standard{p.numerator, p.power, Polynomial(spec.n)};
  const BoundaryProblem moved{p.numerator, p.power, phi};
  const auto mellin = boundary_expansion(standard);
  const auto cut_moved = boundary_cutoff_expansion(moved).expansion;
  const auto cut_fixed = boundary_cutoff_expansion(standard).expansion;
  const auto phi_omega = boundary_expansion(BoundaryProblem{phi * p.numerator, p.power, Polynomial(spec.n)});
  out.verdicts.push_back({"I_0(exp(phi) lambda, omega) = I_0(lambda, omega)", "t-b01iii", cut_moved.log_coeff,
                          mellin.log_coeff, "cutoff", "mellin"});
  out.verdicts.push_back({"I_finite(exp(phi) lambda) - I_finite(lambda) = I_0(phi omega)", "t-b01iv",
                          cut_moved.finite_part - cut_fixed.finite_part, phi_omega.log_coeff, "cutoff", "mellin"});
  const auto log = logarithmic_check(p.numerator, p.power);
  out.notes["logarithmic"] = log.logarithmic;
  if (log.logarithmic) {
    auto test = spec.test_form_value();
    out.notes["test_form_source"] = test ? "spec" : "seed";
    if (!test) {
      const int degree = spec.n - p.numerator.degree();
      do {
        test = gen.form(spec.layout(), degree, 2, {}, 4);
      } while (test->is_zero());
    }
    const Complex lhs = boundary_expansion(BoundaryProblem{wedge(p.numerator, *test), p.power, Polynomial(spec.n)}).log_coeff;
    const Complex rhs = pair_on_Y(boundary_residue(p.numerator, p.power), *test);
    out.verdicts.push_back({"I_0(omega ^ phi) = int_Y R(omega) ^ phi", "t-b04", lhs, rhs, "mellin", "quadrature"});
  }
  return out;
}

using CheckFn = std::function<CheckOutcome(const Context&)>;

const std::vector<std::pair<std::string, CheckFn>>& check_table() {
  static const std::vector<std::pair<std::string, CheckFn>> table = {
      {"conformal", check_conformal}, {"exact", check_exact},     {"residue", check_residue},
      {"homogeneity", check_homogeneity}, {"parity", check_parity}, {"crossing", check_crossing},
      {"boundary", check_boundary}};
  return table;
}

bool applicable(const std::string& name, const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::Crossing:
      return name == "crossing";
    case ProblemKind::Boundary:
      return name == "boundary";
    case ProblemKind::Single:
      if (name == "residue") return spec.codim % 2 == 0 && tame_check(spec.singular_form()).tame;
      return name != "crossing" && name != "boundary";
  }
  return false;
}

json verdict_json(const Verdict& v, double tolerance, bool& all_pass) {
  const double residual = std::abs(v.lhs - v.rhs) / std::max(1.0, std::abs(v.rhs));
  const bool pass = residual <= tolerance;
  all_pass = all_pass && pass;
  return {{"name", v.name},
          {"tag", v.tag},
          {"lhs", {{"engine", v.lhs_engine}, {"value", cj(v.lhs)}}},
          {"rhs", {{"engine", v.rhs_engine}, {"value", cj(v.rhs)}}},
          {"residual", residual},
          {"tolerance", tolerance},
          {"pass", pass}};
}

json run_checks(const Context& ctx, bool& all_pass) {
  const std::string& which = ctx.options.check;
  json checks = json::array();
  json skipped = json::array();
  json notes = json::object();
  bool found = false;
  for (const auto& [name, fn] : check_table()) {
    if (which != "all" && which != name) continue;
    found = true;
    if (which == "all" && !applicable(name, ctx.spec)) {
      skipped.push_back(name);
      continue;
    }
    const CheckOutcome outcome = fn(ctx);
    for (const auto& v : outcome.verdicts) {
      json j = verdict_json(v, ctx.tolerance, all_pass);
      j["check"] = name;
      checks.push_back(std::move(j));
    }
    if (!outcome.notes.empty()) notes[name] = outcome.notes;
  }
  if (!found) throw InvalidArgument("unknown check '" + which + "'");
  json r = {{"checks", checks}, {"all_pass", all_pass}};
  if (!skipped.empty()) r["skipped"] = skipped;
  if (!notes.empty()) r["notes"] = notes;
  return r;
}

json command_echo(const std::string& command, const Context& ctx) {
  json c = {{"name", command}, {"engine", ctx.engine}, {"tolerance", ctx.tolerance}, {"seed", ctx.seed}};
  if (command == "check") c["check"] = ctx.options.check;
  if (ctx.options.s) c["s"] = cj(*ctx.options.s);
  if (ctx.options.t) c["t"] = *ctx.options.t;
  if (ctx.options.eps) c["eps"] = *ctx.options.eps;
  return c;
}

Report finish(Report r, std::chrono::steady_clock::time_point start) {
  static const char* status[] = {"ok", "check_failed", "invalid_input", "numerical_failure"};
  r.json["schema"] = 1;
  r.json["status"] = status[r.exit_code];
  r.json["exit_code"] = r.exit_code;
  if (!r.message.empty()) r.json["error"]["message"] = r.message;
  r.json["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Report failure(int code, const std::string& type, const std::string& message) {
  Report r;
  r.exit_code = code;
  r.message = message;
  r.json["error"] = {{"type", type}, {"message", message}};
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"finite-part", "zeta", "poles", "residue", "level-set", "cutoff",
                                                 "check"};
  return names;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : check_table()) v.push_back(name);
    v.push_back("all");
    return v;
  }();
  return names;
}

Report run(const std::string& command, const ProblemSpec& spec, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Context ctx{spec, options, options.engine.value_or(spec.engine), options.tolerance.value_or(spec.tolerance),
                    options.seed.value_or(spec.seed)};
  Report report;
  json head = {{"command", command_echo(command, ctx)}, {"problem", json::parse(serialize_problem(spec))}};
  try {
    if (!(ctx.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
    json result;
    if (command == "finite-part")
      result = finite_part(ctx);
    else if (command == "zeta")
      result = zeta(ctx);
    else if (command == "poles")
      result = poles(ctx);
    else if (command == "residue")
      result = residue(ctx);
    else if (command == "level-set")
      result = level_set(ctx);
    else if (command == "cutoff")
      result = cutoff(ctx);
    else if (command == "check") {
      bool all_pass = true;
      result = run_checks(ctx, all_pass);
      if (!all_pass) {
        report.exit_code = kCheckFailed;
        report.message = "check failed";
      }
    } else
      throw InvalidArgument("unknown command '" + command + "'");
    report.json = head;
    report.json["result"] = result;
  } catch (const PoleError& e) {
    std::ostringstream msg;
    msg << e.what() << " (pole at s = " << e.location() << ", residue " << e.residue().real()
        << (e.residue().imag() < 0 ? "" : "+") << e.residue().imag() << "i)";
    report = failure(kNumericalFailure, "pole", msg.str());
    report.json["error"]["pole"] = {{"location", e.location()}, {"residue", cj(e.residue())}};
    report.json.update(head);
  } catch (const NumericalFailure& e) {
    report = failure(kNumericalFailure, "numerical_failure", e.what());
    report.json.update(head);
  } catch (const InvalidArgument& e) {
    report = failure(kInvalidInput, "invalid_input", e.what());
    report.json.update(head);
  } catch (const std::exception& e) {
    report = failure(kNumericalFailure, "internal", e.what());
    report.json.update(head);
  }
  return finish(std::move(report), start);
}

Report run_text(const std::string& command, const std::string& spec_text, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ProblemSpec spec;
  try {
    spec = parse_problem(spec_text);
  } catch (const SpecError& e) {
    Report r = failure(kInvalidInput, "invalid_input", e.what());
    r.json["error"]["path"] = e.path();
    r.json["command"] = {{"name", command}};
    return finish(std::move(r), start);
  }
  return run(command, spec, options);
}

std::string payload(const json& report) {
  json copy = report;
  copy.erase("wall_clock_seconds");
  return copy.dump();
}

Complex parse_complex_argument(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  if (!(in >> re)) throw InvalidArgument("expected RE,IM but got '" + text + "'");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw InvalidArgument("expected RE,IM but got '" + text + "'");
  }
  in >> std::ws;
  if (!in.eof()) throw InvalidArgument("expected RE,IM but got '" + text + "'");
  return {re, im};
}

}  // namespace finpart::cli
