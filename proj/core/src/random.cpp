#include "finpart/random.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace finpart {

int ProblemGenerator::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

double ProblemGenerator::uniform_real(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

double ProblemGenerator::coefficient() {
  int k = 0;
  while (k == 0) k = uniform_int(-4, 4);
  return k / static_cast<double>(1 << uniform_int(0, 2));
}

Polynomial ProblemGenerator::polynomial(int n, int max_degree, int terms, double scale, const std::vector<int>& vars) {
  std::vector<int> v = vars;
  if (v.empty()) {
    v.resize(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
  }
  Polynomial p(n);
  for (int t = 0; t < terms; ++t) {
    MultiIndex e = MultiIndex::zero(n);
    const int deg = uniform_int(0, max_degree);
    for (int k = 0; k < deg; ++k) e[v[static_cast<std::size_t>(uniform_int(0, static_cast<int>(v.size()) - 1))]] += 1;
    p.add_term(e, coefficient() * scale);
  }
  return p;
}

Polynomial ProblemGenerator::phi(int n, int max_degree) { return polynomial(n, max_degree, 4, 0.125); }

WindowProduct ProblemGenerator::support_windows(const Layout& layout) {
  WindowProduct w;
  for (int b = 0; b < layout.block_count(); ++b) w.push_back({WindowFactor::Arg::Radial, b, Window()});
  for (int i : layout.base_coords()) w.push_back({WindowFactor::Arg::Coordinate, i, Window()});
  std::sort(w.begin(), w.end());
  return w;
}

Form ProblemGenerator::form(const Layout& layout, int degree, int max_poly_degree, const WindowProduct& windows,
                            int frames, const std::vector<int>& coords) {
  const int n = layout.dimension();
  std::vector<int> pool = coords;
  if (pool.empty()) {
    pool.resize(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
  }
  Form f(layout);
  if (degree < 0 || degree > static_cast<int>(pool.size())) return f;
  std::set<Frame> used;
  for (int t = 0; t < frames; ++t) {
    std::vector<int> idx = pool;
    std::shuffle(idx.begin(), idx.end(), rng_);
    idx.resize(static_cast<std::size_t>(degree));
    const Frame fr = frame_of(idx);
    if (!used.insert(fr).second) continue;
    f.add_term(fr, windows, polynomial(n, max_poly_degree));
  }
  return f;
}

SingularForm ProblemGenerator::top_form(const Layout& layout, int N, int max_poly_degree) {
  std::vector<int> powers(static_cast<std::size_t>(layout.block_count()), N);
  return SingularForm(powers, form(layout, layout.dimension(), max_poly_degree, support_windows(layout), 1));
}

SingularForm ProblemGenerator::singular_form(const Layout& layout, int N, int degree, int max_poly_degree) {
  std::vector<int> powers(static_cast<std::size_t>(layout.block_count()), N);
  return SingularForm(powers, form(layout, degree, max_poly_degree, support_windows(layout)));
}

SingularForm ProblemGenerator::tame_form(int n, int m, int degree, int max_poly_degree) {
  const Layout layout = Layout::single(n, m);
  const WindowProduct w = support_windows(layout);
  const int r = m / 2;
  SingularForm out(0, Form(layout));
  if (degree - m >= 0) {
    Form vol = Form::scalar(layout, Polynomial::constant(n, 1.0));
    for (int i = 0; i < m; ++i) vol = wedge(vol, Form::differential(layout, i));
    out += SingularForm(r, wedge(vol, form(layout, degree - m, max_poly_degree, w, 2, layout.base_coords())));
  }
  if (degree - m + 1 >= 0) out += wedge(canonical_beta(m, n), form(layout, degree - m + 1, max_poly_degree, w));
  if (degree - 1 >= 0) out += wedge(canonical_alpha(m, n), form(layout, degree - 1, max_poly_degree, w));
  out += SingularForm(0, form(layout, degree, max_poly_degree, w));
  return out;
}

}  // namespace finpart
