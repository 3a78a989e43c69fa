#include "finpart/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <tuple>

namespace finpart {
namespace {

Frame full_frame(int n) { return n >= 32 ? ~Frame{0} : ((Frame{1} << n) - 1); }

struct TermWindows {
  std::vector<Window> radial;
  std::vector<std::vector<Window>> base;  // one list per base coordinate
};

TermWindows split_windows(const Layout& layout, const WindowProduct& windows, const std::vector<int>& base) {
  TermWindows tw;
  tw.base.resize(base.size());
  const bool scalar_block = layout.block(0).size == 1;
  for (const WindowFactor& f : windows) {
    if (f.arg == WindowFactor::Arg::Radial) {
      if (f.index != 0) throw InvalidArgument("radial window refers to a missing normal block");
      tw.radial.push_back(f.window);
      continue;
    }
    const int blk = layout.block_of(f.index);
    if (blk >= 0) {
      // On a one-dimensional block x_i^2 is the radial argument itself.
      if (!scalar_block) throw InvalidArgument("coordinate window on a normal coordinate breaks radial symmetry");
      tw.radial.push_back(f.window);
      continue;
    }
    auto it = std::find(base.begin(), base.end(), f.index);
    tw.base[static_cast<std::size_t>(it - base.begin())].push_back(f.window);
  }
  std::sort(tw.radial.begin(), tw.radial.end());
  for (auto& b : tw.base) std::sort(b.begin(), b.end());
  return tw;
}

void require_windows(const TermWindows& tw) {
  if (tw.radial.empty()) throw InvalidArgument("term without a radial window: integrand is not compactly supported");
  for (const auto& b : tw.base)
    if (b.empty()) throw InvalidArgument("term without a base window: integrand is not compactly supported");
}

bool has_pole(const std::vector<Window>& product) {
  return std::all_of(product.begin(), product.end(), [](const Window& w) { return w.order == 0; });
}

double normal_moment(const MultiIndex& e, const std::vector<int>& normal, NormalGeometry geometry) {
  if (geometry == NormalGeometry::HalfLine) return 1.0;
  std::vector<int> gamma;
  gamma.reserve(normal.size());
  for (int i : normal) gamma.push_back(e[i]);
  return sphere_moment(gamma);
}

int normal_degree(const MultiIndex& e, const std::vector<int>& normal) {
  int d = 0;
  for (int i : normal) d += e[i];
  return d;
}

int shift_for(const Layout& layout, int power, NormalGeometry geometry) {
  return geometry == NormalGeometry::Sphere ? layout.block(0).size - 2 * power : 1 - power;
}

void check_single_block(const Layout& layout) {
  if (layout.block_count() != 1 || layout.block(0).first != 0)
    throw InvalidArgument("expected a single normal block starting at x_1");
}

}  // namespace

bool RadialProfile::is_zero() const {
  for (const auto& c : components)
    for (Complex v : c.coeffs)
      if (v != Complex{}) return false;
  return true;
}

Complex RadialProfile::pole_coefficient(int j) const {
  Complex s{};
  if (j < 0) return s;
  for (const auto& c : components)
    if (has_pole(c.window) && j < static_cast<int>(c.coeffs.size())) s += c.coeffs[static_cast<std::size_t>(j)];
  return s;
}

Complex RadialProfile::coefficient(int j) const {
  Complex s{};
  if (j < 0) return s;
  for (const auto& c : components)
    if (j < static_cast<int>(c.coeffs.size())) s += c.coeffs[static_cast<std::size_t>(j)];
  return s;
}

int RadialProfile::max_degree() const {
  int d = -1;
  for (const auto& c : components) d = std::max(d, static_cast<int>(c.coeffs.size()) - 1);
  return d;
}

RadialProfile radial_profile(const Form& numerator, int power, NormalGeometry geometry, const MellinOptions& options) {
  const Layout& layout = numerator.layout();
  check_single_block(layout);
  if (geometry == NormalGeometry::HalfLine && layout.block(0).size != 1)
    throw InvalidArgument("half-line geometry needs a one-dimensional normal block");
  const int n = layout.dimension();
  const std::vector<int> normal = layout.block_coords(0);
  const std::vector<int> base = layout.base_coords();

  RadialProfile prof;
  prof.shift = shift_for(layout, power, geometry);
  prof.geometry = geometry;
  std::map<std::vector<Window>, std::vector<Complex>> acc;
  for (const auto& [key, p] : numerator.terms()) {
    if (key.frame != full_frame(n)) throw InvalidArgument("level-set profile needs a top-degree form");
    const TermWindows tw = split_windows(layout, key.windows, base);
    require_windows(tw);
    std::vector<Complex>& coeffs = acc[tw.radial];
    for (const auto& [e, c] : p.terms()) {
      double m = normal_moment(e, normal, geometry);
      if (m == 0.0) continue;
      for (std::size_t k = 0; k < base.size() && m != 0.0; ++k)
        m *= window_moment(tw.base[k], e[base[k]], options.gauss_order);
      if (m == 0.0) continue;
      const auto j = static_cast<std::size_t>(normal_degree(e, normal));
      if (coeffs.size() <= j) coeffs.resize(j + 1);
      coeffs[j] += c * m;
    }
  }
  for (auto& [w, coeffs] : acc) {
    while (!coeffs.empty() && coeffs.back() == Complex{}) coeffs.pop_back();
    if (!coeffs.empty()) prof.components.push_back({w, std::move(coeffs)});
  }
  return prof;
}

RadialProfile radial_profile(const SingularForm& omega, const MellinOptions& options) {
  return radial_profile(omega.numerator(), omega.power(), NormalGeometry::Sphere, options);
}

Complex profile_residue(const RadialProfile& profile, int k) { return profile.pole_coefficient(-k - profile.shift); }

Complex profile_zeta(const RadialProfile& profile, Complex s, const MellinOptions& options) {
  Complex sum{};
  for (const auto& comp : profile.components) {
    const auto W = shared_window_mellin(comp.window, options.gauss_order, options.panels);
    for (std::size_t j = 0; j < comp.coeffs.size(); ++j) {
      if (comp.coeffs[j] == Complex{}) continue;
      const Complex sigma = s + static_cast<double>(profile.shift + static_cast<int>(j));
      if (W->has_pole() && std::abs(sigma) < 1e-9) {
        const int loc = -profile.shift - static_cast<int>(j);
        throw PoleError(loc, profile_residue(profile, loc),
                        "zeta evaluated at its pole s = " + std::to_string(loc));
      }
      sum += comp.coeffs[j] * W->regular_part(sigma);
    }
  }
  return sum;
}

Complex profile_finite_part(const RadialProfile& profile, const MellinOptions& options) {
  Complex sum{};
  for (const auto& comp : profile.components) {
    const auto W = shared_window_mellin(comp.window, options.gauss_order, options.panels);
    for (std::size_t j = 0; j < comp.coeffs.size(); ++j) {
      if (comp.coeffs[j] == Complex{}) continue;
      const int sigma = profile.shift + static_cast<int>(j);
      sum += comp.coeffs[j] * (sigma == 0 ? Complex(W->finite_part()) : W->regular_part(static_cast<double>(sigma)));
    }
  }
  return sum;
}

// ---------------------------------------------------------------- ZetaEvaluator

struct ZetaEvaluator::Cache {
  std::mutex mutex;
  Form power;  // varying^l * numerator for the last cached l
  std::vector<std::unique_ptr<RadialProfile>> profiles;
};

ZetaEvaluator::ZetaEvaluator(const SingularForm& omega, const MorseBott& mu, MellinOptions options)
    : ZetaEvaluator(omega.numerator(), omega.power(), NormalGeometry::Sphere,
                    mu.phi.is_zero() ? Polynomial(omega.dimension()) : mu.phi, options) {
  if (mu.codim != omega.codim()) throw InvalidArgument("Morse-Bott codimension does not match the form");
}

ZetaEvaluator::ZetaEvaluator(Form numerator, int power, NormalGeometry geometry, Polynomial phi,
                             MellinOptions options)
    : numerator_(std::move(numerator)),
      power_(power),
      geometry_(geometry),
      options_(options),
      cache_(std::make_shared<Cache>()) {
  const Layout& layout = numerator_.layout();
  check_single_block(layout);
  if (geometry_ == NormalGeometry::HalfLine && layout.block(0).size != 1)
    throw InvalidArgument("half-line geometry needs a one-dimensional normal block");
  const int n = layout.dimension();
  varying_ = phi.is_zero() ? Polynomial(n) : std::move(phi);
  if (varying_.dimension() != n) throw InvalidArgument("conformal exponent has the wrong number of variables");
  standard_ = varying_.is_zero();
  if (options_.split_constant) {
    constant_ = varying_.coefficient(MultiIndex::zero(n));
    varying_ -= Polynomial::constant(n, constant_);
  }
  cache_->power = numerator_;
}

const RadialProfile& ZetaEvaluator::series_profile(int l) const {
  std::lock_guard lock(cache_->mutex);
  auto& profiles = cache_->profiles;
  while (static_cast<int>(profiles.size()) <= l) {
    if (!profiles.empty()) cache_->power *= varying_;
    profiles.push_back(std::make_unique<RadialProfile>(
        radial_profile(cache_->power, power_, geometry_, options_)));
  }
  return *profiles[static_cast<std::size_t>(l)];
}

ZetaValue ZetaEvaluator::evaluate(Complex s) const {
  ZetaValue out;
  if (varying_.is_zero()) {
    out.value = profile_zeta(series_profile(0), s, options_) * std::exp(s * constant_);
    out.depth = 1;
    return out;
  }
  // Near an integer pole location every series term is queried for a pole
  // there; the residue of the full series is sum_l p^l/l! res_p(phi^l omega).
  const double nearest = std::round(s.real());
  const bool near_integer = std::abs(s - Complex(nearest)) < 1e-9;
  Complex sum{};
  Complex factor = 1.0;
  int quiet = 0;
  for (int l = 0; l <= options_.max_series_depth; ++l) {
    if (l > 0) factor *= s / static_cast<double>(l);
    const RadialProfile& prof = series_profile(l);
    Complex term;
    try {
      term = factor * profile_zeta(prof, s, options_);
    } catch (const PoleError&) {
      if (!near_integer) throw;
      const int p = static_cast<int>(nearest);
      Complex res{};
      Complex f = 1.0;
      for (int q = 0; q <= options_.max_series_depth; ++q) {
        if (q > 0) f *= static_cast<double>(p) / q;
        const Complex r = f * profile_residue(series_profile(q), p);
        res += r;
        if (p == 0 || (q > 4 && std::abs(r) < 1e-16 * std::abs(res))) break;
      }
      res *= std::exp(static_cast<double>(p) * constant_);
      throw PoleError(p, res, "zeta evaluated at its pole s = " + std::to_string(p));
    }
    sum += term;
    out.depth = l + 1;
    out.truncation = std::abs(term);
    if (std::abs(term) <= options_.series_tolerance * std::max(std::abs(sum), 1e-300)) {
      if (++quiet >= 2) {
        out.truncation = 0.0;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  out.value = sum * std::exp(s * constant_);
  out.truncation *= std::abs(std::exp(s * constant_));
  return out;
}

std::vector<std::pair<int, Complex>> ZetaEvaluator::poles() const {
  if (!standard_) throw InvalidArgument("pole table is defined for the standard Morse-Bott function");
  const RadialProfile& prof = series_profile(0);
  std::vector<std::pair<int, Complex>> out;
  for (int j = 0; j <= prof.max_degree(); ++j) {
    const Complex r = prof.pole_coefficient(j);
    if (r != Complex{}) out.emplace_back(-prof.shift - j, r);
  }
  return out;
}

ZetaValue zeta_eval(const SingularForm& omega, const MorseBott& mu, Complex s, const MellinOptions& options) {
  return ZetaEvaluator(omega, mu, options).evaluate(s);
}

std::vector<std::pair<int, Complex>> pole_table(const SingularForm& omega, const MellinOptions& options) {
  return ZetaEvaluator(omega, MorseBott::standard(omega.dimension(), omega.codim()), options).poles();
}

std::string to_string(Engine e) { return e == Engine::Mellin ? "mellin" : "cutoff"; }

// ---------------------------------------------------------------- base quadrature

Complex base_exp_integral(const Polynomial& p, const Polynomial& g, std::span<const int> base_coords,
                          std::span<const std::vector<Window>> windows, int order) {
  if (windows.size() != base_coords.size()) throw InvalidArgument("one window list per base coordinate required");
  const int n = p.dimension();
  std::vector<std::vector<double>> nodes(base_coords.size());
  std::vector<std::vector<double>> weights(base_coords.size());
  for (std::size_t k = 0; k < base_coords.size(); ++k) {
    const auto& prod = windows[k];
    if (prod.empty()) throw InvalidArgument("base window missing: integrand is not compactly supported");
    double lo = prod.front().inner;
    double hi = prod.front().outer;
    for (const Window& w : prod) {
      lo = std::min(lo, w.inner);
      hi = std::min(hi, w.outer);
    }
    std::vector<double> pts{-hi, hi};
    for (const Window& w : prod)
      for (double r : {w.inner, w.outer})
        if (r >= lo && r < hi) {
          pts.push_back(r);
          pts.push_back(-r);
        }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      // The flat middle is smooth; the bump shoulders get extra panels.
      const int panels = (pts[i] >= -lo && pts[i + 1] <= lo) ? 1 : kDefaultPanels;
      for (int q = 0; q < panels; ++q) fine.push_back(pts[i] + (pts[i + 1] - pts[i]) * q / panels);
    }
    fine.push_back(pts.back());
    const GaussRule rule = composite_gauss(order, fine);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      double w = rule.weights[i];
      for (const Window& win : prod) w *= win(rule.nodes[i] * rule.nodes[i]);
      if (w == 0.0) continue;
      nodes[k].push_back(rule.nodes[i]);
      weights[k].push_back(w);
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<std::size_t> idx(base_coords.size(), 0);
  for (const auto& v : nodes)
    if (v.empty()) return Complex{};
  Complex sum{};
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < base_coords.size(); ++k) {
      x[static_cast<std::size_t>(base_coords[k])] = nodes[k][idx[k]];
      w *= weights[k][idx[k]];
    }
    sum += w * p.evaluate(x) * std::exp(g.evaluate(x));
    std::size_t k = 0;
    for (; k < idx.size(); ++k) {
      if (++idx[k] < nodes[k].size()) break;
      idx[k] = 0;
    }
    if (k == idx.size()) break;
  }
  return sum;
}

// ---------------------------------------------------------------- expansion

namespace {

Polynomial keep_normal_degree(const Polynomial& p, const std::vector<int>& normal, int max_degree) {
  Polynomial r(p.dimension());
  for (const auto& [e, c] : p.terms())
    if (normal_degree(e, normal) <= max_degree) r.add_term(e, c);
  return r;
}

Complex general_conformal_residue(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                                  int k, const MellinOptions& options) {
  const Layout& layout = numerator.layout();
  check_single_block(layout);
  const int n = layout.dimension();
  const std::vector<int> normal = layout.block_coords(0);
  const std::vector<int> base = layout.base_coords();
  const int j = -shift_for(layout, power, geometry) - k;
  if (j < 0) return Complex{};

  Polynomial phi_normal(n);
  Polynomial phi_base(n);
  for (const auto& [e, c] : phi.terms()) (normal_degree(e, normal) > 0 ? phi_normal : phi_base).add_term(e, c);

  // exp(k phi_normal) up to normal degree j; each power adds at least one.
  Polynomial expn = Polynomial::constant(n, 1.0);
  Polynomial term = Polynomial::constant(n, 1.0);
  for (int l = 1; l <= j; ++l) {
    term = keep_normal_degree(term * phi_normal, normal, j) * Complex(static_cast<double>(k) / l);
    expn += term;
  }

  std::map<std::vector<std::vector<Window>>, Polynomial> groups;
  for (const auto& [key, p] : numerator.terms()) {
    if (key.frame != full_frame(n)) throw InvalidArgument("level-set profile needs a top-degree form");
    const TermWindows tw = split_windows(layout, key.windows, base);
    require_windows(tw);
    if (!has_pole(tw.radial)) continue;
    const Polynomial prod = keep_normal_degree(p * expn, normal, j);
    auto [it, inserted] = groups.try_emplace(tw.base, Polynomial(n));
    for (const auto& [e, c] : prod.terms()) {
      if (normal_degree(e, normal) != j) continue;
      const double m = normal_moment(e, normal, geometry);
      if (m == 0.0) continue;
      MultiIndex eb = e;
      for (int i : normal) eb[i] = 0;
      it->second.add_term(eb, c * m);
    }
  }
  const Polynomial g = phi_base * Complex(static_cast<double>(k));
  Complex sum{};
  for (const auto& [w, h] : groups) {
    if (h.is_zero()) continue;
    sum += base_exp_integral(h, g, base, w, std::max(16, options.gauss_order / 2));
  }
  return sum;
}

AsymptoticExpansion general_expansion(const Form& numerator, int power, NormalGeometry geometry,
                                      const Polynomial& phi, const MellinOptions& options) {
  AsymptoticExpansion out;
  out.engine = Engine::Mellin;
  const RadialProfile prof = radial_profile(numerator, power, geometry, options);
  const int K = -prof.shift;
  const bool conformal = !phi.is_zero();
  for (int k = 1; k <= K; ++k) {
    const Complex r = conformal ? general_conformal_residue(numerator, power, geometry, phi, k, options)
                                : profile_residue(prof, k);
    out.divergent[k] = r / static_cast<double>(k);
  }
  out.log_coeff = profile_residue(prof, 0);
  out.finite_part = profile_finite_part(prof, options);
  if (conformal) {
    const RadialProfile shifted = radial_profile(phi * numerator, power, geometry, options);
    out.finite_part += profile_residue(shifted, 0);
  }
  // Quadrature sensitivity: repeat the finite part at a coarser rule.
  MellinOptions coarse = options;
  coarse.gauss_order = std::max(8, options.gauss_order * 3 / 4);
  Complex fp = profile_finite_part(radial_profile(numerator, power, geometry, coarse), coarse);
  if (conformal) fp += profile_residue(radial_profile(phi * numerator, power, geometry, coarse), 0);
  out.error_estimate = std::abs(fp - out.finite_part) + std::abs(out.finite_part) * 1e-15;
  return out;
}

}  // namespace

Complex conformal_residue(const SingularForm& omega, const MorseBott& mu, int k, const MellinOptions& options) {
  return general_conformal_residue(omega.numerator(), omega.power(), NormalGeometry::Sphere, mu.phi, k, options);
}

AsymptoticExpansion expansion(const SingularForm& omega, const MorseBott& mu, const MellinOptions& options) {
  if (mu.codim != omega.codim()) throw InvalidArgument("Morse-Bott codimension does not match the form");
  Polynomial phi = mu.phi.is_zero() ? Polynomial(omega.dimension()) : mu.phi;
  return general_expansion(omega.numerator(), omega.power(), NormalGeometry::Sphere, phi, options);
}

AsymptoticExpansion expansion(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                              const MellinOptions& options) {
  return general_expansion(numerator, power, geometry, phi, options);
}

}  // namespace finpart
