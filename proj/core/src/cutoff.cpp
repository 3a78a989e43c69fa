#include "finpart/cutoff.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace finpart {

EpsilonGrid::EpsilonGrid(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) throw InvalidArgument("epsilon grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw InvalidArgument("epsilon values must be positive");
    if (i > 0 && !(values[i] < values[i - 1])) throw InvalidArgument("epsilon values must decrease");
  }
}

EpsilonGrid EpsilonGrid::geometric(double eps0, double ratio, int count) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("epsilon ratio must lie in (0, 1)");
  if (count < 1) throw InvalidArgument("epsilon grid needs at least one point");
  std::vector<double> v;
  double e = eps0;
  for (int i = 0; i < count; ++i, e *= ratio) v.push_back(e);
  return EpsilonGrid(std::move(v));
}

EpsilonGrid EpsilonGrid::standard(double inner) { return geometric(inner / 10.0, 0.7, 12); }

EpsilonGrid EpsilonGrid::adapted(int divergence_order, double inner, int min_count) {
  return geometric(inner / 10.0, divergence_order >= 3 ? 0.8 : 0.7, std::max(12, min_count));
}

namespace {

using LD = long double;
using CLD = std::complex<long double>;

struct Monomial {
  CLD coeff;
  std::vector<int> normal;  // exponents on the normal coordinates
  std::vector<int> base;    // exponents on the base coordinates
  int degree = 0;           // normal degree
};

struct Term {
  int component = 0;
  std::vector<std::vector<Window>> base_windows;
  std::vector<Monomial> monomials;
};

struct PhiMonomial {
  LD coeff;
  std::vector<int> normal;
  std::vector<int> base;
  int degree = 0;
};

struct Problem {
  int m = 0;
  int shift = 0;
  NormalGeometry geometry = NormalGeometry::Sphere;
  std::vector<int> normal;
  std::vector<int> base;
  std::vector<std::vector<Window>> components;
  std::vector<bool> pole;
  std::vector<Term> terms;
  std::vector<PhiMonomial> phi;
  int max_degree = 0;
  int phi_degree = 0;
  double r0 = 0.0;  // radial windows are flat below r0
  double r1 = 0.0;  // and vanish above r1
  std::vector<std::vector<double>> base_breakpoints;

  bool conformal() const { return !phi.empty(); }
};

std::vector<int> pick(const MultiIndex& e, const std::vector<int>& coords) {
  std::vector<int> out;
  out.reserve(coords.size());
  for (int i : coords) out.push_back(e[i]);
  return out;
}

Problem build(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi) {
  const Layout& layout = numerator.layout();
  if (layout.block_count() != 1 || layout.block(0).first != 0)
    throw InvalidArgument("expected a single normal block starting at x_1");
  const int n = layout.dimension();
  Problem pb;
  pb.geometry = geometry;
  pb.m = layout.block(0).size;
  if (geometry == NormalGeometry::HalfLine && pb.m != 1)
    throw InvalidArgument("half-line geometry needs a one-dimensional normal block");
  pb.shift = geometry == NormalGeometry::Sphere ? pb.m - 2 * power : 1 - power;
  pb.normal = layout.block_coords(0);
  pb.base = layout.base_coords();
  pb.base_breakpoints.resize(pb.base.size());

  const Frame full = n >= 32 ? ~Frame{0} : ((Frame{1} << n) - 1);
  pb.r0 = std::numeric_limits<double>::infinity();
  pb.r1 = 0.0;
  for (const auto& [key, p] : numerator.terms()) {
    if (key.frame != full) throw InvalidArgument("cutoff integral needs a top-degree form");
    std::vector<Window> radial;
    Term t;
    t.base_windows.resize(pb.base.size());
    for (const WindowFactor& f : key.windows) {
      if (f.arg == WindowFactor::Arg::Radial || layout.block_of(f.index) >= 0) {
        if (f.arg == WindowFactor::Arg::Coordinate && pb.m != 1)
          throw InvalidArgument("coordinate window on a normal coordinate breaks radial symmetry");
        radial.push_back(f.window);
        continue;
      }
      const auto it = std::find(pb.base.begin(), pb.base.end(), f.index);
      t.base_windows[static_cast<std::size_t>(it - pb.base.begin())].push_back(f.window);
    }
    if (radial.empty()) throw InvalidArgument("term without a radial window: integrand is not compactly supported");
    std::sort(radial.begin(), radial.end());
    double lo = radial.front().inner;
    double hi = radial.front().outer;
    for (const Window& w : radial) {
      lo = std::min(lo, w.inner);
      hi = std::min(hi, w.outer);
    }
    pb.r0 = std::min(pb.r0, lo);
    pb.r1 = std::max(pb.r1, hi);
    for (std::size_t k = 0; k < pb.base.size(); ++k) {
      auto& ws = t.base_windows[k];
      if (ws.empty()) throw InvalidArgument("term without a base window: integrand is not compactly supported");
      std::sort(ws.begin(), ws.end());
      for (const Window& w : ws) {
        pb.base_breakpoints[k].push_back(w.inner);
        pb.base_breakpoints[k].push_back(w.outer);
      }
    }
    auto cit = std::find(pb.components.begin(), pb.components.end(), radial);
    if (cit == pb.components.end()) {
      pb.components.push_back(radial);
      pb.pole.push_back(std::all_of(radial.begin(), radial.end(), [](const Window& w) { return w.order == 0; }));
      cit = pb.components.end() - 1;
    }
    t.component = static_cast<int>(cit - pb.components.begin());
    for (const auto& [e, c] : p.terms()) {
      Monomial mo{CLD(c.real(), c.imag()), pick(e, pb.normal), pick(e, pb.base), 0};
      for (int v : mo.normal) mo.degree += v;
      pb.max_degree = std::max(pb.max_degree, mo.degree);
      t.monomials.push_back(std::move(mo));
    }
    pb.terms.push_back(std::move(t));
  }
  if (!phi.is_zero()) {
    if (phi.dimension() != n) throw InvalidArgument("conformal exponent has the wrong number of variables");
    for (const auto& [e, c] : phi.terms()) {
      if (c.imag() != 0.0) throw InvalidArgument("conformal exponent must be real");
      PhiMonomial pm{c.real(), pick(e, pb.normal), pick(e, pb.base), 0};
      for (int v : pm.normal) pm.degree += v;
      pb.phi_degree = std::max(pb.phi_degree, pm.degree);
      pb.phi.push_back(std::move(pm));
    }
  }
  return pb;
}

// Base tensor grid: per coordinate a composite rule on [-b, b] with panels
// aligned to the window radii.
std::vector<GaussRule> base_rules(const Problem& pb, int order) {
  std::vector<GaussRule> rules;
  for (auto pts : pb.base_breakpoints) {
    const double hi = *std::max_element(pts.begin(), pts.end());
    const double lo = *std::min_element(pts.begin(), pts.end());
    std::vector<double> all;
    for (double p : pts) {
      all.push_back(p);
      all.push_back(-p);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
      const int panels = (all[i] >= -lo && all[i + 1] <= lo) ? 1 : kDefaultPanels;
      for (int q = 0; q < panels; ++q) fine.push_back(all[i] + (all[i + 1] - all[i]) * q / panels);
    }
    fine.push_back(hi);
    rules.push_back(composite_gauss(order, fine));
  }
  return rules;
}

SphereRule normal_rule(const Problem& pb, int order) {
  return pb.geometry == NormalGeometry::HalfLine ? half_line_rule() : sphere_rule(pb.m, order);
}

// Data of one ray (y, x''): coefficients of the integrand and of phi as
// polynomials in r.
struct Ray {
  LD weight = 0;
  std::vector<std::vector<CLD>> p;  // [component][k]
  std::vector<LD> q;                // phi(r y, x'') = sum_d q[d] r^d
};

LD ipow(LD x, int k) {
  LD r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

template <class Fn>
void for_each_ray(const Problem& pb, const CutoffOptions& options, Fn&& fn) {
  const SphereRule dirs = normal_rule(pb, options.sphere_order);
  const std::vector<GaussRule> rules = base_rules(pb, options.base_order);
  const std::size_t nb = pb.base.size();
  std::vector<std::size_t> idx(nb, 0);
  std::vector<double> xb(nb, 0.0);
  Ray ray;
  ray.p.assign(pb.components.size(), std::vector<CLD>(static_cast<std::size_t>(pb.max_degree) + 1));
  ray.q.assign(static_cast<std::size_t>(pb.phi_degree) + 1, 0);
  std::vector<double> term_weight(pb.terms.size());
  while (true) {
    LD wb = 1;
    for (std::size_t k = 0; k < nb; ++k) {
      xb[k] = rules[k].nodes[idx[k]];
      wb *= rules[k].weights[idx[k]];
    }
    bool any = false;
    for (std::size_t t = 0; t < pb.terms.size(); ++t) {
      double w = 1.0;
      for (std::size_t k = 0; k < nb && w != 0.0; ++k)
        for (const Window& win : pb.terms[t].base_windows[k]) w *= win(xb[k] * xb[k]);
      term_weight[t] = w;
      any = any || w != 0.0;
    }
    if (any) {
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const auto y = dirs.direction(d);
        ray.weight = wb * static_cast<LD>(dirs.weights[d]);
        for (auto& v : ray.p) std::fill(v.begin(), v.end(), CLD{});
        std::fill(ray.q.begin(), ray.q.end(), LD{0});
        for (std::size_t t = 0; t < pb.terms.size(); ++t) {
          if (term_weight[t] == 0.0) continue;
          auto& p = ray.p[static_cast<std::size_t>(pb.terms[t].component)];
          for (const Monomial& mo : pb.terms[t].monomials) {
            LD v = term_weight[t];
            for (std::size_t i = 0; i < mo.normal.size(); ++i) v *= ipow(y[i], mo.normal[i]);
            for (std::size_t k = 0; k < nb; ++k) v *= ipow(xb[k], mo.base[k]);
            p[static_cast<std::size_t>(mo.degree)] += mo.coeff * v;
          }
        }
        for (const PhiMonomial& pm : pb.phi) {
          LD v = pm.coeff;
          for (std::size_t i = 0; i < pm.normal.size(); ++i) v *= ipow(y[i], pm.normal[i]);
          for (std::size_t k = 0; k < nb; ++k) v *= ipow(xb[k], pm.base[k]);
          ray.q[static_cast<std::size_t>(pm.degree)] += v;
        }
        fn(static_cast<const Ray&>(ray));
      }
    }
    std::size_t k = 0;
    for (; k < nb; ++k) {
      if (++idx[k] < rules[k].size()) break;
      idx[k] = 0;
    }
    if (k == nb) break;
  }
}

LD phi_at(const std::vector<LD>& q, LD r) {
  LD v = 0;
  for (std::size_t d = q.size(); d-- > 0;) v = v * r + q[d];
  return v;
}

LD phi_slope(const std::vector<LD>& q, LD r) {
  LD v = 0;
  for (std::size_t d = q.size(); d-- > 1;) v = v * r + static_cast<LD>(d) * q[d];
  return v;
}

// Root of h(r) = log(r / eps) + phi(r) = 0. Newton steps r <- r (1 - h / h_u)
// with h_u = 1 + r phi'(r) from a warm start; a bracketed bisection in
// log r takes over if Newton stalls.
LD radial_root(const std::vector<LD>& q, LD eps, LD guess, int max_iter) {
  auto h = [&](LD r) { return std::log(r / eps) + phi_at(q, r); };
  LD r = guess;
  LD last = std::numeric_limits<LD>::infinity();
  for (int it = 0; it < 12; ++it) {
    const LD hr = h(r);
    const LD slope = 1 + r * phi_slope(q, r);
    if (!(slope > 0) || !(std::abs(hr) < last)) break;
    last = std::abs(hr);
    const LD step = hr / slope;
    if (std::abs(step) > 0.5) break;
    r *= 1 - step;
    if (std::abs(step) < 8 * std::numeric_limits<LD>::epsilon()) {
      if (!(1 + r * phi_slope(q, r) > 0))
        throw NumericalFailure("non-monotone radial map: the cutoff region is not star-shaped");
      return r;
    }
  }
  // Fallback: bracket in u = log r, then bisect.
  LD lo = std::log(guess);
  LD hi = lo;
  int guard = 0;
  while (h(std::exp(lo)) > 0) {
    lo -= 1;
    if (++guard > 200) throw NumericalFailure("radial root finder could not bracket the cutoff");
  }
  while (h(std::exp(hi)) < 0) {
    hi += 0.5;
    if (++guard > 400) throw NumericalFailure("radial root finder could not bracket the cutoff");
  }
  for (int it = 0; it < max_iter && hi - lo > 4 * std::numeric_limits<LD>::epsilon() * std::max<LD>(1, std::abs(lo));
       ++it) {
    const LD mid = (lo + hi) / 2;
    (h(std::exp(mid)) < 0 ? lo : hi) = mid;
  }
  r = std::exp((lo + hi) / 2);
  for (int it = 0; it < 2; ++it) r *= 1 - h(r) / (1 + r * phi_slope(q, r));
  if (!(1 + r * phi_slope(q, r) > 0))
    throw NumericalFailure("non-monotone radial map: the cutoff region is not star-shaped");
  return r;
}

// int_{lo}^{hi} r^e dr in extended precision.
LD power_integral(int e, LD lo, LD hi) {
  if (e == -1) return std::log(hi / lo);
  const LD p = static_cast<LD>(e + 1);
  return (std::pow(hi, p) - std::pow(lo, p)) / p;
}

LD window_value(const std::vector<Window>& ws, double u) {
  LD w = 1;
  for (const Window& x : ws) w *= x(u);
  return w;
}

// h(r) = sum_{c,k} p[c][k] r^{shift-1+k} W_c(r^2), integrated on [a, b] by
// composite Gauss.
CLD ray_numeric(const Problem& pb, const Ray& ray, LD a, LD b, int order) {
  if (!(a < b)) return {};
  const double pts[] = {static_cast<double>(a), static_cast<double>(a + (b - a) / 4), static_cast<double>(a + (b - a) / 2),
                        static_cast<double>(a + 3 * (b - a) / 4), static_cast<double>(b)};
  const GaussRule rule = composite_gauss(order, pts);
  CLD sum{};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const LD r = rule.nodes[i];
    for (std::size_t c = 0; c < pb.components.size(); ++c) {
      const LD w = window_value(pb.components[c], static_cast<double>(r * r));
      if (w == 0) continue;
      CLD h{};
      for (std::size_t k = ray.p[c].size(); k-- > 0;) h = h * r + ray.p[c][k];
      sum += static_cast<LD>(rule.weights[i]) * w * h * std::pow(r, static_cast<LD>(pb.shift - 1));
    }
  }
  return sum;
}

}  // namespace

std::vector<ExtendedComplex> cutoff_samples_extended(const Form& numerator, int power, NormalGeometry geometry,
                                                     const Polynomial& phi, std::span<const double> eps,
                                                     const CutoffOptions& options) {
  for (double e : eps)
    if (!(e > 0.0)) throw InvalidArgument("eps must be positive");
  const Problem pb = build(numerator, power, geometry, phi);
  std::vector<CLD> acc(eps.size());
  if (pb.terms.empty()) return acc;

  // Shell moments int_{r0}^{r1} r^{shift-1+k} W_c(r^2) dr, shared by all rays.
  std::vector<std::vector<LD>> shell(pb.components.size(),
                                     std::vector<LD>(static_cast<std::size_t>(pb.max_degree) + 1, 0));
  {
    const double pts[] = {pb.r0, pb.r0 + (pb.r1 - pb.r0) / 4, pb.r0 + (pb.r1 - pb.r0) / 2,
                          pb.r0 + 3 * (pb.r1 - pb.r0) / 4, pb.r1};
    const GaussRule rule = composite_gauss(options.radial_order, pts);
    for (std::size_t c = 0; c < pb.components.size(); ++c)
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const LD r = rule.nodes[i];
        const LD w = window_value(pb.components[c], rule.nodes[i] * rule.nodes[i]) * static_cast<LD>(rule.weights[i]);
        LD rk = std::pow(r, static_cast<LD>(pb.shift - 1));
        for (std::size_t k = 0; k < shell[c].size(); ++k, rk *= r) shell[c][k] += w * rk;
      }
  }

  // F(eps) = sum_rays weight * [shell + sum_{pole c,k} p[c][k] int_{r*}^{r0} r^{e_k} dr]
  // with e_k = shift - 1 + k. The r0 end of the analytic integral and the
  // shell do not depend on eps and are accumulated once.
  const int kmax = pb.max_degree;
  std::vector<LD> inv(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) inv[static_cast<std::size_t>(k)] = pb.shift + k == 0 ? 0 : 1 / static_cast<LD>(pb.shift + k);
  CLD fixed{};
  // Standard case: r* = eps on every ray, so only the aggregated p matter.
  std::vector<std::vector<CLD>> P(pb.components.size(), std::vector<CLD>(static_cast<std::size_t>(kmax) + 1));
  const LD eps_max = *std::max_element(eps.begin(), eps.end());
  const bool inside = eps_max < pb.r0;
  const LD r0 = pb.r0;
  std::vector<LD> r0pow(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    const int e1 = pb.shift + k;
    r0pow[static_cast<std::size_t>(k)] = e1 == 0 ? std::log(r0) : std::pow(r0, static_cast<LD>(e1)) * inv[static_cast<std::size_t>(k)];
  }
  std::vector<CLD> pole_p(static_cast<std::size_t>(kmax) + 1);
  for_each_ray(pb, options, [&](const Ray& ray) {
    std::fill(pole_p.begin(), pole_p.end(), CLD{});
    CLD shell_part{};
    for (std::size_t c = 0; c < pb.components.size(); ++c)
      for (std::size_t k = 0; k < ray.p[c].size(); ++k) {
        shell_part += ray.p[c][k] * shell[c][k];
        if (pb.pole[c]) pole_p[k] += ray.p[c][k];
      }
    if (!pb.conformal()) {
      for (std::size_t c = 0; c < P.size(); ++c)
        for (std::size_t k = 0; k < P[c].size(); ++k) P[c][k] += ray.weight * ray.p[c][k];
      return;
    }
    // The whole window shell must lie inside the region for every eps.
    for (LD r : {static_cast<LD>(pb.r0), static_cast<LD>((pb.r0 + pb.r1) / 2), static_cast<LD>(pb.r1)})
      if (!(std::log(r / eps_max) + phi_at(ray.q, r) > 0))
        throw NumericalFailure("cutoff region does not contain the window shell; use smaller eps");
    if (inside) {
      CLD top = shell_part;
      for (std::size_t k = 0; k < pole_p.size(); ++k) top += pole_p[k] * r0pow[k];
      fixed += ray.weight * top;
    }
    LD rs = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const LD e = eps[i];
      const LD start = i > 0 ? rs * e / static_cast<LD>(eps[i - 1]) : e * std::exp(-phi_at(ray.q, e * std::exp(-ray.q[0])));
      rs = radial_root(ray.q, e, start, options.max_root_iterations);
      if (inside) {
        // Subtract the r* end: sum_k p_k r*^{e_k+1} / (e_k+1), or log r*.
        CLD low{};
        LD rp = std::pow(rs, static_cast<LD>(pb.shift));
        for (std::size_t k = 0; k < pole_p.size(); ++k, rp *= rs) {
          if (pole_p[k] == CLD{}) continue;
          low += pole_p[k] * (pb.shift + static_cast<int>(k) == 0 ? std::log(rs) : rp * inv[k]);
        }
        acc[i] -= ray.weight * low;
      } else {
        acc[i] += ray.weight * ray_numeric(pb, ray, rs, pb.r1, options.radial_order);
      }
    }
  });
  if (pb.conformal()) {
    if (inside)
      for (auto& a : acc) a += fixed;
    return acc;
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const LD e = eps[i];
    CLD v{};
    for (std::size_t c = 0; c < P.size(); ++c)
      for (std::size_t k = 0; k < P[c].size(); ++k) {
        if (P[c][k] == CLD{}) continue;
        v += P[c][k] * shell[c][k];
        if (!pb.pole[c] || !(e < pb.r0)) continue;
        v += P[c][k] * power_integral(pb.shift - 1 + static_cast<int>(k), e, pb.r0);
      }
    if (!(e < pb.r0)) {
      // Large eps: integrate the aggregated profile numerically.
      v = {};
      Ray agg;
      agg.p = P;
      agg.weight = 1;
      v = ray_numeric(pb, agg, e, pb.r1, options.radial_order);
    }
    acc[i] = v;
  }
  return acc;
}

std::vector<Complex> cutoff_samples(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                                    std::span<const double> eps, const CutoffOptions& options) {
  std::vector<Complex> out;
  for (const CLD& a : cutoff_samples_extended(numerator, power, geometry, phi, eps, options))
    out.emplace_back(static_cast<double>(a.real()), static_cast<double>(a.imag()));
  return out;
}

std::vector<Complex> cutoff_samples(const SingularForm& omega, const MorseBott& mu, std::span<const double> eps,
                                    const CutoffOptions& options) {
  if (mu.codim != omega.codim()) throw InvalidArgument("Morse-Bott codimension does not match the form");
  return cutoff_samples(omega.numerator(), omega.power(), NormalGeometry::Sphere, mu.phi, eps, options);
}

Complex cutoff_integral(const SingularForm& omega, const MorseBott& mu, double eps, const CutoffOptions& options) {
  const double e[] = {eps};
  return cutoff_samples(omega, mu, e, options).front();
}

Complex level_set_integral_numeric(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                                   double t, const CutoffOptions& options) {
  const Problem pb = build(numerator, power, geometry, phi);
  if (pb.terms.empty()) return {};
  if (t == 0.0) {
    if (pb.shift < 0) throw InvalidArgument("level-set integral at t = 0 diverges for this pole order");
  }
  if (pb.conformal() && !(t > 0.0)) throw InvalidArgument("conformal level-set integral needs t > 0");
  CLD acc{};
  const LD tt = t;
  for_each_ray(pb, options, [&](const Ray& ray) {
    LD r = tt;
    LD jac = 1;
    if (pb.conformal()) {
      r = radial_root(ray.q, tt, tt * std::exp(-ray.q[0]), options.max_root_iterations);
      // t dr*/dt = r* / (1 + r* phi'(r*)); the level set carries r^{shift}.
      jac = 1 / (1 + r * phi_slope(ray.q, r));
    }
    CLD v{};
    for (std::size_t c = 0; c < pb.components.size(); ++c) {
      const LD w = window_value(pb.components[c], static_cast<double>(r * r));
      if (w == 0) continue;
      CLD h{};
      for (std::size_t k = ray.p[c].size(); k-- > 0;) h = h * r + ray.p[c][k];
      v += w * h;
    }
    // r^{shift} with integer shift, valid for negative r.
    LD rp = 1;
    for (int k = 0; k < std::abs(pb.shift); ++k) rp *= r;
    if (pb.shift < 0) rp = 1 / rp;
    acc += ray.weight * v * rp * jac;
  });
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

Complex level_set_integral_numeric(const SingularForm& omega, const MorseBott& mu, double t,
                                   const CutoffOptions& options) {
  if (mu.codim != omega.codim()) throw InvalidArgument("Morse-Bott codimension does not match the form");
  return level_set_integral_numeric(omega.numerator(), omega.power(), NormalGeometry::Sphere, mu.phi, t, options);
}

Complex mellin_of_level_set(const SingularForm& omega, double s, const CutoffOptions& options) {
  const Problem pb = build(omega.numerator(), omega.power(), NormalGeometry::Sphere, Polynomial(omega.dimension()));
  if (pb.terms.empty()) return {};
  if (!(s + pb.shift > 0.0)) throw InvalidArgument("Mellin integral of the level set diverges at t = 0 for this s");
  // Aggregate the ray coefficients: I(t) = sum_{c,k} P[c][k] t^{shift+k} W_c(t^2).
  std::vector<std::vector<CLD>> P(pb.components.size(),
                                  std::vector<CLD>(static_cast<std::size_t>(pb.max_degree) + 1));
  for_each_ray(pb, options, [&](const Ray& ray) {
    for (std::size_t c = 0; c < P.size(); ++c)
      for (std::size_t k = 0; k < P[c].size(); ++k) P[c][k] += ray.weight * ray.p[c][k];
  });
  std::vector<double> pts;
  for (int q = 0; q <= 4; ++q) pts.push_back(pb.r0 * q / 4);
  for (int q = 1; q <= 4; ++q) pts.push_back(pb.r0 + (pb.r1 - pb.r0) * q / 4);
  const GaussRule rule = composite_gauss(options.radial_order, pts);
  CLD sum{};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const LD t = rule.nodes[i];
    CLD v{};
    for (std::size_t c = 0; c < P.size(); ++c) {
      const LD w = window_value(pb.components[c], rule.nodes[i] * rule.nodes[i]);
      if (w == 0) continue;
      CLD h{};
      for (std::size_t k = P[c].size(); k-- > 0;) h = h * t + P[c][k];
      v += w * h;
    }
    sum += static_cast<LD>(rule.weights[i]) * v * std::pow(t, static_cast<LD>(s + pb.shift - 1));
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

// ---------------------------------------------------------------- fitting

FitReport fit_expansion(std::span<const double> eps, std::span<const ExtendedComplex> values,
                        const std::vector<int>& divergent_powers, const FitOptions& options) {
  using Matrix = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  if (eps.size() != values.size()) throw InvalidArgument("eps and value lists differ in length");
  const std::size_t cols = divergent_powers.size() + 2 + static_cast<std::size_t>(std::max(0, options.nuisance));
  if (eps.size() < cols + 4)
    throw InvalidArgument("fit needs at least " + std::to_string(cols + 4) + " samples, got " +
                          std::to_string(eps.size()));
  const auto rows = static_cast<Eigen::Index>(eps.size());
  Matrix A(rows, static_cast<Eigen::Index>(cols));
  Matrix b(rows, 2);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const LD e = eps[static_cast<std::size_t>(i)];
    if (!(e > 0)) throw InvalidArgument("eps must be positive");
    Eigen::Index c = 0;
    for (int k : divergent_powers) A(i, c++) = std::pow(e, static_cast<LD>(-k));
    A(i, c++) = -std::log(e);
    A(i, c++) = 1;
    for (int q = 0; q < options.nuisance; ++q)
      A(i, c++) = std::pow(e, static_cast<LD>(options.nuisance_first + q * options.nuisance_step));
    b(i, 0) = values[static_cast<std::size_t>(i)].real();
    b(i, 1) = values[static_cast<std::size_t>(i)].imag();
  }
  Eigen::Matrix<LD, Eigen::Dynamic, 1> scale(A.cols());
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    scale(c) = A.col(c).norm();
    if (scale(c) == 0) throw NumericalFailure("fit column vanishes identically");
    A.col(c) /= scale(c);
  }
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  FitReport report;
  report.condition_number = sv(sv.size() - 1) > 0 ? static_cast<double>(sv(0) / sv(sv.size() - 1))
                                                    : std::numeric_limits<double>::infinity();
  if (!(report.condition_number <= options.max_condition))
    throw NumericalFailure("fit is rank deficient: condition number " + std::to_string(report.condition_number));
  Matrix x = svd.solve(b);
  report.residual_norm = static_cast<double>((A * x - b).norm());
  for (Eigen::Index c = 0; c < x.rows(); ++c) x.row(c) /= scale(c);

  auto coeff = [&](Eigen::Index c) { return Complex(static_cast<double>(x(c, 0)), static_cast<double>(x(c, 1))); };
  AsymptoticExpansion& ex = report.expansion;
  ex.engine = Engine::Cutoff;
  Eigen::Index c = 0;
  const int kmax = divergent_powers.empty() ? 0 : *std::max_element(divergent_powers.begin(), divergent_powers.end());
  for (int k = 1; k <= kmax; ++k) ex.divergent[k] = Complex{};
  for (int k : divergent_powers) ex.divergent[k] = coeff(c++);
  ex.log_coeff = coeff(c++);
  ex.finite_part = coeff(c++);
  for (int q = 0; q < options.nuisance; ++q) report.nuisance.push_back(coeff(c++));
  ex.error_estimate = report.residual_norm / std::sqrt(static_cast<double>(rows));
  return report;
}

FitReport fit_expansion(std::span<const double> eps, std::span<const Complex> values,
                        const std::vector<int>& divergent_powers, const FitOptions& options) {
  std::vector<ExtendedComplex> ext(values.begin(), values.end());
  return fit_expansion(eps, ext, divergent_powers, options);
}

std::vector<int> divergent_basis(int m, int N) {
  std::vector<int> powers;
  for (int k = 1; k <= 2 * N - m; ++k)
    if ((k - m) % 2 == 0) powers.push_back(k);
  return powers;
}

namespace {

FitOptions with_parity(FitOptions options, int m) {
  options.nuisance_first = m % 2 == 0 ? 2 : 1;
  options.nuisance_step = 2;
  return options;
}

}  // namespace

FitReport fit_expansion(std::span<const double> eps, std::span<const Complex> values, int m, int N,
                        const FitOptions& options) {
  return fit_expansion(eps, values, divergent_basis(m, N), with_parity(options, m));
}

FitReport cutoff_expansion(const Form& numerator, int power, NormalGeometry geometry, const Polynomial& phi,
                           const EpsilonGrid& grid, const CutoffOptions& options, const FitOptions& fit) {
  const int m = numerator.layout().block_count() == 1 ? numerator.layout().block(0).size : 0;
  std::vector<int> powers;
  FitOptions fo = fit;
  int order = 0;
  if (geometry == NormalGeometry::Sphere) {
    powers = divergent_basis(m, power);
    fo = with_parity(fit, m);
    order = 2 * power - m;
  } else {
    for (int k = 1; k <= power - 1; ++k) powers.push_back(k);
    order = power - 1;
  }
  const int columns = static_cast<int>(powers.size()) + 2 + fo.nuisance;
  const EpsilonGrid g = grid.size() > 0 ? grid : EpsilonGrid::adapted(order, kDefaultInner, columns + 4);
  const auto values = cutoff_samples_extended(numerator, power, geometry, phi, g.values, options);
  return fit_expansion(g.values, values, powers, fo);
}

FitReport cutoff_expansion(const SingularForm& omega, const MorseBott& mu, const EpsilonGrid& grid,
                           const CutoffOptions& options, const FitOptions& fit) {
  if (mu.codim != omega.codim()) throw InvalidArgument("Morse-Bott codimension does not match the form");
  return cutoff_expansion(omega.numerator(), omega.power(), NormalGeometry::Sphere, mu.phi, grid, options, fit);
}

}  // namespace finpart
