#include "finpart/multi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>

namespace finpart {
namespace {

Frame full_frame(int n) { return n >= 32 ? ~Frame{0} : ((Frame{1} << n) - 1); }

void check_components(ComponentSet M, int count) {
  if (count > 16) throw InvalidArgument("at most 16 crossing components are supported");
  if (M >> count) throw InvalidArgument("component set refers to a missing component");
}

bool contains(ComponentSet M, int i) { return (M >> i) & 1U; }

}  // namespace

// ---------------------------------------------------------------- CrossingProblem

CrossingProblem::CrossingProblem(SingularForm form, std::vector<Polynomial> conformal)
    : omega(std::move(form)), phis(std::move(conformal)) {
  const Layout& layout = omega.layout();
  if (layout.block_count() < 1) throw InvalidArgument("crossing problem needs at least one component");
  if (!phis.empty() && static_cast<int>(phis.size()) != layout.block_count())
    throw InvalidArgument("one conformal exponent per component required");
  for (Polynomial& p : phis)
    if (p.dimension() == 0) p = Polynomial(layout.dimension());
  for (const Polynomial& p : phis)
    if (p.dimension() != layout.dimension()) throw InvalidArgument("conformal exponent has the wrong number of variables");
}

bool CrossingProblem::is_standard(int i) const {
  return phis.empty() || phis[static_cast<std::size_t>(i)].is_zero();
}

CrossingProblem CrossingProblem::standard() const { return CrossingProblem(omega); }

CrossingProblem CrossingProblem::times(const Polynomial& p) const {
  return CrossingProblem(p * omega, phis);
}

CrossingProblem CrossingProblem::with_phi(int i, const Polynomial& phi) const {
  std::vector<Polynomial> ph = phis;
  if (ph.empty()) ph.assign(static_cast<std::size_t>(components()), Polynomial(omega.dimension()));
  ph[static_cast<std::size_t>(i)] = phi;
  return CrossingProblem(omega, std::move(ph));
}

// ---------------------------------------------------------------- profile

MultiProfile multi_profile(const Form& numerator, const std::vector<int>& powers, const MellinOptions& options) {
  const Layout& layout = numerator.layout();
  const int n = layout.dimension();
  const int c = layout.block_count();
  if (static_cast<int>(powers.size()) != c) throw InvalidArgument("one denominator power per component required");
  const std::vector<int> base = layout.base_coords();
  std::vector<std::vector<int>> block_coords;
  MultiProfile prof;
  for (int b = 0; b < c; ++b) {
    block_coords.push_back(layout.block_coords(b));
    prof.shift.push_back(layout.block(b).size - 2 * powers[static_cast<std::size_t>(b)]);
  }
  for (const auto& [key, p] : numerator.terms()) {
    if (key.frame != full_frame(n)) throw InvalidArgument("crossing zeta needs a top-degree form");
    MultiTerm t;
    t.windows.resize(static_cast<std::size_t>(c));
    std::vector<std::vector<Window>> base_windows(base.size());
    for (const WindowFactor& f : key.windows) {
      if (f.arg == WindowFactor::Arg::Radial) {
        if (f.index < 0 || f.index >= c) throw InvalidArgument("radial window refers to a missing component");
        t.windows[static_cast<std::size_t>(f.index)].push_back(f.window);
        continue;
      }
      const int blk = layout.block_of(f.index);
      if (blk >= 0) {
        if (layout.block(blk).size != 1)
          throw InvalidArgument("coordinate window on a normal coordinate breaks radial symmetry");
        t.windows[static_cast<std::size_t>(blk)].push_back(f.window);
        continue;
      }
      const auto it = std::find(base.begin(), base.end(), f.index);
      base_windows[static_cast<std::size_t>(it - base.begin())].push_back(f.window);
    }
    for (auto& w : t.windows) {
      if (w.empty()) throw InvalidArgument("term without a radial window on some component: not compactly supported");
      std::sort(w.begin(), w.end());
    }
    for (auto& w : base_windows) {
      if (w.empty()) throw InvalidArgument("term without a base window: integrand is not compactly supported");
      std::sort(w.begin(), w.end());
    }
    for (const auto& [e, coeff] : p.terms()) {
      double m = 1.0;
      t.degree.assign(static_cast<std::size_t>(c), 0);
      for (int b = 0; b < c && m != 0.0; ++b) {
        std::vector<int> gamma;
        for (int i : block_coords[static_cast<std::size_t>(b)]) {
          gamma.push_back(e[i]);
          t.degree[static_cast<std::size_t>(b)] += e[i];
        }
        m *= sphere_moment(gamma);
      }
      for (std::size_t k = 0; k < base.size() && m != 0.0; ++k)
        m *= window_moment(base_windows[k], e[base[k]], options.gauss_order);
      if (m == 0.0) continue;
      Complex& slot = prof.terms[t];
      slot += coeff * m;
    }
  }
  std::erase_if(prof.terms, [](const auto& kv) { return kv.second == Complex{}; });
  return prof;
}

// ---------------------------------------------------------------- MultiZeta

struct MultiZeta::Cache {
  std::mutex mutex;
  std::map<std::vector<int>, Form> forms;
  std::map<std::vector<int>, MultiProfile> profiles;
};

MultiZeta::MultiZeta(CrossingProblem problem, MellinOptions options)
    : problem_(std::move(problem)), options_(options), cache_(std::make_shared<Cache>()) {
  for (int i = 0; i < problem_.components(); ++i)
    if (!problem_.is_standard(i)) conformal_.push_back(i);
}

const MultiProfile& MultiZeta::profile(const std::vector<int>& powers) const {
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->profiles.find(powers);
  if (it != cache_->profiles.end()) return it->second;
  // prod_k phi_k^{l_k} * numerator, built from the form one power lower.
  std::function<const Form&(const std::vector<int>&)> form = [&](const std::vector<int>& l) -> const Form& {
    auto f = cache_->forms.find(l);
    if (f != cache_->forms.end()) return f->second;
    std::size_t k = 0;
    while (k < l.size() && l[k] == 0) ++k;
    Form out = problem_.omega.numerator();
    if (k < l.size()) {
      std::vector<int> lower = l;
      --lower[k];
      out = problem_.phis[static_cast<std::size_t>(conformal_[k])] * form(lower);
    }
    return cache_->forms.emplace(l, std::move(out)).first->second;
  };
  MultiProfile p = multi_profile(form(powers), problem_.omega.powers(), options_);
  return cache_->profiles.emplace(powers, std::move(p)).first->second;
}

namespace {

using MemoKey = std::pair<std::vector<Window>, Complex>;

struct MemoLess {
  bool operator()(const MemoKey& a, const MemoKey& b) const {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.real() != b.second.real()) return a.second.real() < b.second.real();
    return a.second.imag() < b.second.imag();
  }
};

using Memo = std::map<MemoKey, Complex, MemoLess>;

// sum c prod_b W_b(s_b + shift_b + j_b) with per-call caching of W values.
Complex evaluate_profile(const MultiProfile& prof, std::span<const Complex> s, const MellinOptions& options,
                         Memo& memo) {
  Complex sum{};
  for (const auto& [t, c] : prof.terms) {
    Complex prod = c;
    for (std::size_t b = 0; b < t.windows.size(); ++b) {
      const Complex sigma = s[b] + static_cast<double>(prof.shift[b] + t.degree[b]);
      const auto key = std::make_pair(t.windows[b], sigma);
      auto it = memo.find(key);
      if (it == memo.end()) {
        const auto W = shared_window_mellin(t.windows[b], options.gauss_order, options.panels);
        if (W->has_pole() && std::abs(sigma) < 1e-9)
          throw PoleError(s[b].real(), Complex{},
                          "crossing zeta evaluated on the pole hyperplane s_" + std::to_string(b + 1) + " = " +
                              std::to_string(-prof.shift[b] - t.degree[b]));
        it = memo.emplace(key, W->regular_part(sigma)).first;
      }
      prod *= it->second;
    }
    sum += prod;
  }
  return sum;
}

}  // namespace

Complex MultiZeta::evaluate(std::span<const Complex> s) const {
  if (static_cast<int>(s.size()) != problem_.components())
    throw InvalidArgument("one s value per component required");
  Memo memo;
  const std::size_t k = conformal_.size();
  if (k == 0) return evaluate_profile(profile({}), s, options_, memo);
  // Sum over l in N^k by total degree L of prod s_i^{l_i} / l_i! zeta(phi^l omega).
  Complex sum{};
  int quiet = 0;
  for (int L = 0; L <= options_.max_series_depth; ++L) {
    Complex shell{};
    std::vector<int> l(k, 0);
    // Enumerate compositions of L into k parts.
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
      if (pos + 1 == k) {
        l[pos] = left;
        Complex f = 1.0;
        for (std::size_t q = 0; q < k; ++q) {
          const Complex si = s[static_cast<std::size_t>(conformal_[q])];
          for (int a = 1; a <= l[q]; ++a) f *= si / static_cast<double>(a);
        }
        if (f != Complex{}) shell += f * evaluate_profile(profile(l), s, options_, memo);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        l[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, L);
    sum += shell;
    if (std::abs(shell) <= options_.series_tolerance * std::max(std::abs(sum), 1e-300)) {
      if (++quiet >= 2) return sum;
    } else {
      quiet = 0;
    }
  }
  throw NumericalFailure("crossing zeta series did not converge within the depth limit");
}

Complex multi_zeta(const CrossingProblem& p, std::span<const Complex> s, const MellinOptions& options) {
  return MultiZeta(p, options).evaluate(s);
}

// ---------------------------------------------------------------- coefficients

namespace {

// Per-factor operator on W(s + sigma0) at s = 0: residue or constant term.
Complex factor_op(const std::vector<Window>& windows, int sigma0, bool constant, const MellinOptions& options) {
  const auto W = shared_window_mellin(windows, options.gauss_order, options.panels);
  if (!constant) return (sigma0 == 0 && W->has_pole()) ? Complex(1.0) : Complex{};
  return W->regular_part(static_cast<double>(sigma0));
}

// I_M of the standard problem; `residue_also` marks components in M whose
// operator is the residue (the l_i = 1 series term).
Complex standard_IM(const MultiProfile& prof, ComponentSet M, ComponentSet residue_also, const MellinOptions& options) {
  Complex sum{};
  for (const auto& [t, c] : prof.terms) {
    Complex prod = c;
    for (std::size_t b = 0; b < t.windows.size() && prod != Complex{}; ++b) {
      const bool constant = contains(M, static_cast<int>(b)) && !contains(residue_also, static_cast<int>(b));
      prod *= factor_op(t.windows[b], prof.shift[b] + t.degree[b], constant, options);
    }
    sum += prod;
  }
  return sum;
}

}  // namespace

Complex coefficient_IM(const CrossingProblem& p, ComponentSet M, const MellinOptions& options) {
  const int c = p.components();
  check_components(M, c);
  // Conformal components in M contribute their l = 0 and l = 1 series terms.
  ComponentSet conf = 0;
  for (int i = 0; i < c; ++i)
    if (contains(M, i) && !p.is_standard(i)) conf |= 1U << i;
  Complex sum{};
  for (ComponentSet L = conf;; L = (L - 1) & conf) {
    Form num = p.omega.numerator();
    for (int i = 0; i < c; ++i)
      if (contains(L, i)) num = p.phis[static_cast<std::size_t>(i)] * num;
    sum += standard_IM(multi_profile(num, p.omega.powers(), options), M, L, options);
    if (L == 0) break;
  }
  return sum;
}

Complex coefficient_IM_contour(const CrossingProblem& p, ComponentSet M, double radius, int points,
                               const MellinOptions& options) {
  const int c = p.components();
  check_components(M, c);
  if (!(radius > 0.0 && radius < 2.0)) throw InvalidArgument("contour radius must lie in (0, 2)");
  if (points < 4) throw InvalidArgument("contour needs at least four points");
  const MultiZeta zeta(p, options);
  std::vector<Complex> nodes(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    nodes[static_cast<std::size_t>(k)] = std::polar(radius, 2.0 * std::numbers::pi * (k + 0.5) / points);
  // (1/2 pi i) contour of f ds = mean(f s); with the extra 1/s: mean(f).
  std::vector<int> idx(static_cast<std::size_t>(c), 0);
  std::vector<Complex> s(static_cast<std::size_t>(c));
  Complex sum{};
  while (true) {
    Complex w = 1.0;
    for (int b = 0; b < c; ++b) {
      s[static_cast<std::size_t>(b)] = nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)])];
      if (!contains(M, b)) w *= s[static_cast<std::size_t>(b)];
    }
    sum += w * zeta.evaluate(s);
    int b = 0;
    for (; b < c; ++b) {
      if (++idx[static_cast<std::size_t>(b)] < points) break;
      idx[static_cast<std::size_t>(b)] = 0;
    }
    if (b == c) break;
  }
  return sum / std::pow(static_cast<double>(points), c);
}

MultiExpansion multi_expansion(const CrossingProblem& p, const MellinOptions& options) {
  const int c = p.components();
  check_components(0, c);
  MultiExpansion ex;
  const ComponentSet full = (1U << c) - 1U;
  for (ComponentSet M = 0; M <= full; ++M) ex.coefficients[M] = coefficient_IM(p, M, options);
  ex.finite_part = ex.coefficients[full];
  return ex;
}

double CrossingReport::max_residual() const {
  double r = 0.0;
  for (const LawCheck& c : checks) r = std::max(r, c.residual);
  return r;
}

namespace {

std::string set_name(ComponentSet M, int c) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < c; ++i)
    if (contains(M, i)) {
      if (!first) s += ",";
      s += std::to_string(i + 1);
      first = false;
    }
  return s + "}";
}

}  // namespace

CrossingReport crossing_conformal_check(const CrossingProblem& p, const std::vector<Polynomial>& phis,
                                        const MellinOptions& options) {
  const int c = p.components();
  check_components(0, c);
  if (static_cast<int>(phis.size()) != c) throw InvalidArgument("one conformal exponent per component required");
  const CrossingProblem base = p.standard();
  const ComponentSet full = (1U << c) - 1U;
  CrossingReport rep;
  auto add = [&](std::string law, Complex lhs, Complex rhs) {
    rep.checks.push_back({std::move(law), lhs, rhs, std::abs(lhs - rhs)});
  };
  for (int i = 0; i < c; ++i) {
    const Polynomial& phi = phis[static_cast<std::size_t>(i)];
    if (phi.is_zero()) continue;
    const CrossingProblem moved = base.with_phi(i, phi);
    for (ComponentSet M = 0; M <= full; ++M) {
      const Complex lhs = coefficient_IM_contour(moved, M, 0.5, 24, options);
      if (!contains(M, i)) {
        add("(1) I_" + set_name(M, c) + " independent of mu_" + std::to_string(i + 1), lhs,
            coefficient_IM(base, M, options));
      } else {
        const Complex rhs = coefficient_IM(base, M, options) + coefficient_IM(base.times(phi), M & ~(1U << i), options);
        add("(2) I_" + set_name(M, c) + " under mu_" + std::to_string(i + 1) + " -> exp(2 phi) mu_" +
                std::to_string(i + 1),
            lhs, rhs);
      }
    }
  }
  // Corollary: I_finite with every factor moved = sum_M I_M(prod_{i not in M} phi_i omega).
  CrossingProblem all = base;
  for (int i = 0; i < c; ++i)
    if (!phis[static_cast<std::size_t>(i)].is_zero()) all = all.with_phi(i, phis[static_cast<std::size_t>(i)]);
  const Complex lhs = coefficient_IM_contour(all, full, 0.5, 24, options);
  Complex rhs{};
  for (ComponentSet M = 0; M <= full; ++M) {
    Polynomial prod = Polynomial::constant(p.omega.dimension(), 1.0);
    bool zero = false;
    for (int i = 0; i < c; ++i)
      if (!contains(M, i)) {
        if (phis[static_cast<std::size_t>(i)].is_zero()) zero = true;
        prod = prod * phis[static_cast<std::size_t>(i)];
      }
    if (!zero) rhs += coefficient_IM(base.times(prod), M, options);
  }
  add("corollary: I_finite with all factors moved", lhs, rhs);
  return rep;
}

// ---------------------------------------------------------------- boundary

namespace {

void check_boundary(const Form& numerator) {
  const Layout& layout = numerator.layout();
  if (layout.block_count() != 1 || layout.block(0).first != 0 || layout.block(0).size != 1)
    throw InvalidArgument("boundary problem needs the single normal block {x_1}");
}

bool near_boundary_vanishes(const Layout& layout, const WindowProduct& windows) {
  return std::any_of(windows.begin(), windows.end(), [&](const WindowFactor& f) {
    return (f.arg == WindowFactor::Arg::Radial || layout.block_of(f.index) >= 0) && f.window.order > 0;
  });
}

// Divides every coefficient by x_1^k; returns false if some term is not
// divisible. Terms vanishing near the boundary are skipped.
bool divide_x1(const Form& f, int k, Form* out) {
  const int n = f.dimension();
  *out = Form(f.layout());
  for (const auto& [key, p] : f.terms()) {
    if (near_boundary_vanishes(f.layout(), key.windows)) continue;
    Polynomial q(n);
    for (const auto& [e, c] : p.terms()) {
      if (e[0] < k) return false;
      MultiIndex r = e;
      r[0] -= k;
      q.add_term(r, c);
    }
    out->add_term(key.frame, key.windows, q);
  }
  return true;
}

}  // namespace

ZetaValue boundary_zeta(const BoundaryProblem& p, Complex s, const MellinOptions& options) {
  check_boundary(p.numerator);
  return ZetaEvaluator(p.numerator, p.power, NormalGeometry::HalfLine,
                       p.phi.dimension() == 0 ? Polynomial(p.dimension()) : p.phi, options)
      .evaluate(s);
}

std::vector<std::pair<int, Complex>> boundary_poles(const BoundaryProblem& p, const MellinOptions& options) {
  check_boundary(p.numerator);
  return ZetaEvaluator(p.numerator, p.power, NormalGeometry::HalfLine, Polynomial(p.dimension()), options).poles();
}

AsymptoticExpansion boundary_expansion(const BoundaryProblem& p, const MellinOptions& options) {
  check_boundary(p.numerator);
  return expansion(p.numerator, p.power, NormalGeometry::HalfLine,
                   p.phi.dimension() == 0 ? Polynomial(p.dimension()) : p.phi, options);
}

FitReport boundary_cutoff_expansion(const BoundaryProblem& p, const EpsilonGrid& grid, const CutoffOptions& options,
                                    const FitOptions& fit) {
  check_boundary(p.numerator);
  return cutoff_expansion(p.numerator, p.power, NormalGeometry::HalfLine,
                          p.phi.dimension() == 0 ? Polynomial(p.dimension()) : p.phi, grid, options, fit);
}

LogarithmicReport logarithmic_check(const Form& numerator, int power) {
  check_boundary(numerator);
  LogarithmicReport rep;
  Form tmp;
  // x_1 omega = x_1^{1-M} eta.
  if (power > 1 && !divide_x1(numerator, power - 1, &tmp)) {
    rep.reason = "x_1 omega is not smooth: numerator not divisible by x_1^" + std::to_string(power - 1);
    return rep;
  }
  // (dx_1/x_1) ^ omega = x_1^{-M-1} dx_1 ^ eta.
  const Form dx1_eta = wedge(Form::differential(numerator.layout(), 0), numerator);
  if (power + 1 > 0 && !divide_x1(dx1_eta, power + 1, &tmp)) {
    rep.reason = "(dx_1/x_1) ^ omega is not smooth: dx_1 ^ numerator not divisible by x_1^" +
                 std::to_string(power + 1);
    return rep;
  }
  rep.logarithmic = true;
  return rep;
}

ResidueForm boundary_residue(const Form& numerator, int power) {
  const LogarithmicReport rep = logarithmic_check(numerator, power);
  if (!rep.logarithmic) throw InvalidArgument("boundary residue needs a logarithmic form: " + rep.reason);
  const Layout& layout = numerator.layout();
  // Numerator over x_1^1: x_1^{1-M} eta = dx_1 ^ sigma + x_1 tau.
  Form eta(layout);
  if (power >= 1) {
    divide_x1(numerator, power - 1, &eta);
  } else {
    eta = numerator;
    for (int k = power; k < 1; ++k) eta = Polynomial::variable(layout.dimension(), 0) * eta;
  }
  Form sigma(layout);
  for (const auto& [key, p] : eta.terms()) {
    if (near_boundary_vanishes(layout, key.windows)) continue;
    if (key.frame & 1U) sigma.add_term(key.frame & ~Frame{1}, key.windows, p);
  }
  ResidueForm R;
  R.codim = 1;
  R.form = restrict_to_Y(sigma);
  return R;
}

}  // namespace finpart
