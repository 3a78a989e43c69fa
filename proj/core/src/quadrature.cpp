#include "finpart/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace finpart {
namespace {

// Nodes and weights on [-1, 1], computed by Newton iteration on P_n.
const GaussRule& reference_rule(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(order));
  r.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0, p1 = x;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) r.nodes[static_cast<std::size_t>(half - 1)] = 0.0;
  return cache.emplace(order, std::move(r)).first->second;
}

}  // namespace

GaussRule gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw InvalidArgument("Gauss order must be positive");
  const GaussRule& ref = reference_rule(order);
  GaussRule r;
  r.lo = lo;
  r.hi = hi;
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  r.nodes.reserve(ref.size());
  r.weights.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    r.nodes.push_back(mid + half * ref.nodes[i]);
    r.weights.push_back(half * ref.weights[i]);
  }
  return r;
}

GaussRule composite_gauss(int order, std::span<const double> breakpoints) {
  if (breakpoints.size() < 2) throw InvalidArgument("composite rule needs at least two breakpoints");
  GaussRule r;
  r.lo = breakpoints.front();
  r.hi = breakpoints.back();
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) throw InvalidArgument("breakpoints must increase");
    GaussRule p = gauss_legendre(order, breakpoints[i], breakpoints[i + 1]);
    r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
    r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
  }
  return r;
}

double gamma_half(int k) {
  if (k <= 0) throw InvalidArgument("gamma_half needs a positive argument");
  if (k > 300) return std::tgamma(0.5 * k);
  // Gamma(x + 1) = x Gamma(x), starting from Gamma(1) or Gamma(1/2).
  double g = (k % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
  for (int j = (k % 2 == 0) ? 2 : 1; j < k; j += 2) g *= 0.5 * j;
  return g;
}

double sphere_moment(std::span<const int> gamma) {
  const int m = static_cast<int>(gamma.size());
  if (m < 1) throw InvalidArgument("sphere_moment needs m >= 1");
  int total = 0;
  double num = 2.0;
  for (int g : gamma) {
    if (g < 0) throw InvalidArgument("negative exponent");
    if (g % 2 != 0) return 0.0;
    num *= gamma_half(g + 1);
    total += g;
  }
  return num / gamma_half(total + m);
}

double sphere_area(int m) { return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / gamma_half(m); }

SphereRule sphere_rule(int m, int order) {
  if (m < 1) throw InvalidArgument("sphere dimension must be positive");
  SphereRule r;
  r.dim = m;
  if (m == 1) {
    r.directions = {1.0, -1.0};
    r.weights = {1.0, 1.0};
    return r;
  }
  const int azimuth = 2 * order;
  const GaussRule polar = gauss_legendre(order, 0.0, std::numbers::pi);
  // Enumerate polar angle tuples theta_1..theta_{m-2} then the azimuth.
  std::vector<std::size_t> idx(static_cast<std::size_t>(m - 2), 0);
  while (true) {
    double w = 1.0;
    std::vector<double> y(static_cast<std::size_t>(m), 0.0);
    double sin_prod = 1.0;
    for (int k = 0; k < m - 2; ++k) {
      const double th = polar.nodes[idx[static_cast<std::size_t>(k)]];
      w *= polar.weights[idx[static_cast<std::size_t>(k)]] * std::pow(std::sin(th), m - 2 - k);
      y[static_cast<std::size_t>(k)] = sin_prod * std::cos(th);
      sin_prod *= std::sin(th);
    }
    for (int j = 0; j < azimuth; ++j) {
      const double ph = 2.0 * std::numbers::pi * j / azimuth;
      y[static_cast<std::size_t>(m - 2)] = sin_prod * std::cos(ph);
      y[static_cast<std::size_t>(m - 1)] = sin_prod * std::sin(ph);
      r.directions.insert(r.directions.end(), y.begin(), y.end());
      r.weights.push_back(w * 2.0 * std::numbers::pi / azimuth);
    }
    // Advance the odometer over polar angles.
    int k = m - 3;
    while (k >= 0) {
      if (++idx[static_cast<std::size_t>(k)] < static_cast<std::size_t>(order)) break;
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return r;
}

SphereRule half_line_rule() {
  SphereRule r;
  r.dim = 1;
  r.directions = {1.0};
  r.weights = {1.0};
  return r;
}

namespace {

double product_value(const std::vector<Window>& product, double u) {
  double w = 1.0;
  for (const Window& f : product) {
    w *= f(u);
    if (w == 0.0) break;
  }
  return w;
}

// Support [lo, hi] of t -> prod w(t^2) away from the flat region, plus the
// breakpoints where any factor changes regime.
std::vector<double> radial_breakpoints(const std::vector<Window>& product, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  for (const Window& w : product) {
    if (w.inner > lo && w.inner < hi) pts.push_back(w.inner);
    if (w.outer > lo && w.outer < hi) pts.push_back(w.outer);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<double> subdivide(const std::vector<double>& pts, int panels) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (int k = 0; k < panels; ++k) out.push_back(pts[i] + (pts[i + 1] - pts[i]) * k / panels);
  out.push_back(pts.back());
  return out;
}

}  // namespace

WindowMellin::WindowMellin(std::vector<Window> product, int order, int panels) : product_(std::move(product)) {
  if (product_.empty()) throw InvalidArgument("radial window missing: integrand is not compactly supported");
  has_pole_ = std::all_of(product_.begin(), product_.end(), [](const Window& w) { return w.order == 0; });
  lo_ = product_.front().inner;
  hi_ = product_.front().outer;
  for (const Window& w : product_) {
    lo_ = std::min(lo_, w.inner);
    hi_ = std::min(hi_, w.outer);
  }
  const GaussRule rule = composite_gauss(order, subdivide(radial_breakpoints(product_, lo_, hi_), panels));
  nodes_ = rule.nodes;
  weighted_.resize(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i)
    weighted_[i] = rule.weights[i] * product_value(product_, rule.nodes[i] * rule.nodes[i]);
}

Complex WindowMellin::operator()(Complex sigma) const {
  if (has_pole_ && std::abs(sigma) < 1e-9)
    throw PoleError(0.0, 1.0, "window Mellin transform evaluated at its pole sigma = 0 (residue 1)");
  return regular_part(sigma);
}

double WindowMellin::finite_part() const {
  double s = has_pole_ ? std::log(lo_) : 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weighted_[i] / nodes_[i];
  return s;
}

Complex WindowMellin::regular_part(Complex sigma) const {
  if (sigma == Complex{}) return finite_part();
  Complex s = has_pole_ ? std::exp(sigma * std::log(lo_)) / sigma : Complex{};
  const Complex e = sigma - 1.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weighted_[i] * std::exp(e * std::log(nodes_[i]));
  return s;
}

std::shared_ptr<const WindowMellin> shared_window_mellin(const std::vector<Window>& product, int order, int panels) {
  using Key = std::tuple<std::vector<Window>, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const WindowMellin>> cache;
  std::lock_guard lock(mutex);
  Key key{product, order, panels};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto w = std::make_shared<const WindowMellin>(product, order, panels);
  cache.emplace(std::move(key), w);
  return w;
}

double window_moment(const std::vector<Window>& product, int exponent, int order) {
  if (product.empty()) throw InvalidArgument("base window missing: integrand is not compactly supported");
  if (exponent < 0) throw InvalidArgument("negative exponent");
  if (exponent % 2 != 0) return 0.0;

  using Key = std::tuple<std::vector<Window>, int, int>;
  static std::mutex mutex;
  static std::map<Key, double> cache;
  Key key{product, exponent, order};
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  double lo = product.front().inner;
  double hi = product.front().outer;
  for (const Window& w : product) {
    lo = std::min(lo, w.inner);
    hi = std::min(hi, w.outer);
  }
  // [0, lo] is polynomial for order-0 products; [lo, hi] carries the bump.
  std::vector<double> pts = radial_breakpoints(product, lo, hi);
  pts = subdivide(pts, kDefaultPanels);
  pts.insert(pts.begin(), 0.0);
  const GaussRule rule = composite_gauss(order, pts);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    s += rule.weights[i] * std::pow(x, exponent) * product_value(product, x * x);
  }
  s *= 2.0;
  std::lock_guard lock(mutex);
  cache.emplace(std::move(key), s);
  return s;
}

Complex base_integral(const Polynomial& p, std::span<const int> base_coords,
                      std::span<const std::vector<Window>> windows, int order) {
  if (windows.size() != base_coords.size()) throw InvalidArgument("one window list per base coordinate required");
  for (const auto& w : windows)
    if (w.empty()) throw InvalidArgument("base window missing: integrand is not compactly supported");
  Complex sum{};
  for (const auto& [e, c] : p.terms()) {
    int used = 0;
    for (int i : base_coords) used += e[i];
    if (used != e.total_degree()) throw InvalidArgument("base_integral: polynomial depends on a normal coordinate");
    double m = 1.0;
    for (std::size_t k = 0; k < base_coords.size() && m != 0.0; ++k)
      m *= window_moment(windows[k], e[base_coords[k]], order);
    sum += c * m;
  }
  return sum;
}

}  // namespace finpart
