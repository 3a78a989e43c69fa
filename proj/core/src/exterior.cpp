#include "finpart/exterior.hpp"

#include <algorithm>
#include <bit>

namespace finpart {

// ---------------------------------------------------------------- Layout

Layout::Layout(int n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
  if (n < 0 || n > 32) throw InvalidArgument("ambient dimension must be between 0 and 32");
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const Block& b : blocks_) {
    if (b.size < 1 || b.first < 0 || b.last() > n)
      throw InvalidArgument("normal block out of range");
    for (int i = b.first; i < b.last(); ++i) {
      if (used[static_cast<std::size_t>(i)]) throw InvalidArgument("normal blocks overlap");
      used[static_cast<std::size_t>(i)] = true;
    }
  }
}

Layout Layout::single(int n, int m) {
  if (m < 1 || m > n) throw InvalidArgument("codimension must satisfy 1 <= m <= n");
  return Layout(n, {Block{0, m}});
}

int Layout::block_of(int i) const {
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (blocks_[b].contains(i)) return static_cast<int>(b);
  return -1;
}

std::vector<int> Layout::normal_coords() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (block_of(i) >= 0) out.push_back(i);
  return out;
}

std::vector<int> Layout::block_coords(int b) const {
  std::vector<int> out;
  for (int i = block(b).first; i < block(b).last(); ++i) out.push_back(i);
  return out;
}

std::vector<int> Layout::base_coords() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (block_of(i) < 0) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------- frames

WindowProduct multiply(const WindowProduct& a, const WindowProduct& b) {
  WindowProduct r;
  r.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

Frame frame_of(const std::vector<int>& indices) {
  Frame f = 0;
  for (int i : indices) f |= Frame{1} << i;
  return f;
}

std::vector<int> frame_indices(Frame f) {
  std::vector<int> out;
  for (int i = 0; f != 0; ++i, f >>= 1)
    if (f & 1u) out.push_back(i);
  return out;
}

int frame_degree(Frame f) { return std::popcount(f); }

int wedge_sign(Frame a, Frame b) {
  if (a & b) return 0;
  // Each index of b must move past every larger index of a.
  int swaps = 0;
  for (int j : frame_indices(b)) swaps += std::popcount(a >> (j + 1));
  return (swaps % 2 == 0) ? 1 : -1;
}

int normalize_frame(std::vector<int>& indices) {
  int sign = 1;
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t j = 0; j + 1 < indices.size() - i; ++j) {
      if (indices[j] == indices[j + 1]) return 0;
      if (indices[j] > indices[j + 1]) {
        std::swap(indices[j], indices[j + 1]);
        sign = -sign;
      }
    }
  for (std::size_t j = 0; j + 1 < indices.size(); ++j)
    if (indices[j] == indices[j + 1]) return 0;
  return sign;
}

// ---------------------------------------------------------------- Form

Form Form::scalar(const Layout& layout, const Polynomial& p, WindowProduct w) {
  Form f(layout);
  std::sort(w.begin(), w.end());
  f.add_term(0, w, p);
  return f;
}

Form Form::differential(const Layout& layout, int i) {
  if (i < 0 || i >= layout.dimension()) throw InvalidArgument("differential index out of range");
  Form f(layout);
  f.add_term(Frame{1} << i, {}, Polynomial::constant(layout.dimension(), 1.0));
  return f;
}

int Form::degree() const {
  int d = -1;
  for (const auto& [key, p] : terms_) {
    const int k = frame_degree(key.frame);
    if (d >= 0 && k != d) throw InvalidArgument("form is not homogeneous");
    d = k;
  }
  return d;
}

void Form::add_term(Frame frame, const WindowProduct& windows, const Polynomial& coeff) {
  if (coeff.is_zero()) return;
  if (coeff.dimension() != dimension()) throw InvalidArgument("coefficient dimension mismatch");
  if (dimension() < 32 && (frame >> dimension()) != 0) throw InvalidArgument("frame index out of range");
  TermKey key{frame, windows};
  if (!std::is_sorted(key.windows.begin(), key.windows.end()))
    std::sort(key.windows.begin(), key.windows.end());
  auto [it, inserted] = terms_.try_emplace(key, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Form& Form::operator+=(const Form& other) {
  if (other.is_zero()) return *this;
  if (!(layout_ == other.layout_)) throw InvalidArgument("form layout mismatch");
  for (const auto& [key, p] : other.terms_) add_term(key.frame, key.windows, p);
  return *this;
}

Form& Form::operator-=(const Form& other) {
  if (other.is_zero()) return *this;
  if (!(layout_ == other.layout_)) throw InvalidArgument("form layout mismatch");
  for (const auto& [key, p] : other.terms_) add_term(key.frame, key.windows, -p);
  return *this;
}

Form& Form::operator*=(Complex c) {
  Form r(layout_);
  for (const auto& [key, p] : terms_) r.add_term(key.frame, key.windows, p * c);
  *this = std::move(r);
  return *this;
}

Form& Form::operator*=(const Polynomial& q) {
  Form r(layout_);
  for (const auto& [key, p] : terms_) r.add_term(key.frame, key.windows, p * q);
  *this = std::move(r);
  return *this;
}

namespace {

double window_argument(const Layout& layout, const WindowFactor& f, std::span<const double> x) {
  if (f.arg == WindowFactor::Arg::Coordinate) {
    const double v = x[static_cast<std::size_t>(f.index)];
    return v * v;
  }
  double u = 0.0;
  const Block& b = layout.block(f.index);
  for (int i = b.first; i < b.last(); ++i) u += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  return u;
}

}  // namespace

Complex Form::component(Frame frame, std::span<const double> x) const {
  Complex sum{};
  for (const auto& [key, p] : terms_) {
    if (key.frame != frame) continue;
    double w = 1.0;
    for (const WindowFactor& f : key.windows) w *= f.window(window_argument(layout_, f, x));
    if (w == 0.0) continue;
    sum += p.evaluate(x) * w;
  }
  return sum;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }
Form operator*(Form a, Complex c) { return a *= c; }
Form operator*(Complex c, Form a) { return a *= c; }
Form operator*(const Polynomial& p, Form a) { return a *= p; }

Form wedge(const Form& a, const Form& b) {
  if (!(a.layout() == b.layout())) throw InvalidArgument("wedge: form layout mismatch");
  Form r(a.layout());
  for (const auto& [ka, pa] : a.terms())
    for (const auto& [kb, pb] : b.terms()) {
      const int s = wedge_sign(ka.frame, kb.frame);
      if (s == 0) continue;
      r.add_term(ka.frame | kb.frame, multiply(ka.windows, kb.windows),
                 (pa * pb) * Complex(static_cast<double>(s)));
    }
  return r;
}

Form exterior_derivative(const Form& a) {
  const Layout& layout = a.layout();
  const int n = layout.dimension();
  Form r(layout);
  for (const auto& [key, p] : a.terms()) {
    for (int i = 0; i < n; ++i) {
      const Frame di = Frame{1} << i;
      const int s = wedge_sign(di, key.frame);
      if (s == 0) continue;
      Polynomial dp = p.derivative(i);
      if (dp.is_zero()) continue;
      r.add_term(key.frame | di, key.windows, dp * Complex(static_cast<double>(s)));
    }
    // Chain rule through each window factor: d w^{(k)}(u) = w^{(k+1)}(u) du,
    // with du = sum 2 x_i dx_i over the factor's argument.
    for (std::size_t k = 0; k < key.windows.size(); ++k) {
      WindowProduct bumped = key.windows;
      bumped[k].window = bumped[k].window.derivative();
      std::sort(bumped.begin(), bumped.end());
      const WindowFactor& f = key.windows[k];
      std::vector<int> coords;
      if (f.arg == WindowFactor::Arg::Coordinate) coords = {f.index};
      else coords = layout.block_coords(f.index);
      for (int i : coords) {
        const Frame di = Frame{1} << i;
        const int s = wedge_sign(di, key.frame);
        if (s == 0) continue;
        r.add_term(key.frame | di, bumped,
                   p * Polynomial::variable(n, i) * Complex(2.0 * static_cast<double>(s)));
      }
    }
  }
  return r;
}

Form iota_euler(const Form& a, int block) {
  const Layout& layout = a.layout();
  const int n = layout.dimension();
  const Block& blk = layout.block(block);
  Form r(layout);
  for (const auto& [key, p] : a.terms()) {
    const std::vector<int> idx = frame_indices(key.frame);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      const int i = idx[pos];
      if (!blk.contains(i)) continue;
      const double s = (pos % 2 == 0) ? 1.0 : -1.0;
      r.add_term(key.frame & ~(Frame{1} << i), key.windows, p * Polynomial::variable(n, i) * Complex(s));
    }
  }
  return r;
}

Polynomial mu_polynomial(const Layout& layout, int block) {
  const int n = layout.dimension();
  Polynomial mu(n);
  for (int i : layout.block_coords(block)) {
    MultiIndex e = MultiIndex::zero(n);
    e[i] = 2;
    mu.add_term(e, 1.0);
  }
  return mu;
}

Form d_mu(const Layout& layout, int block) {
  return exterior_derivative(Form::scalar(layout, mu_polynomial(layout, block)));
}

// ---------------------------------------------------------------- SingularForm

SingularForm::SingularForm(std::vector<int> powers, Form numerator)
    : powers_(std::move(powers)), numerator_(std::move(numerator)) {
  if (static_cast<int>(powers_.size()) != numerator_.layout().block_count())
    throw InvalidArgument("one denominator power per normal block is required");
  for (int p : powers_)
    if (p < 0) throw InvalidArgument("denominator power must be nonnegative");
}

SingularForm::SingularForm(int power, Form numerator)
    : SingularForm(std::vector<int>{power}, std::move(numerator)) {}

SingularForm SingularForm::raised_to(const std::vector<int>& target) const {
  if (target.size() != powers_.size()) throw InvalidArgument("power vector length mismatch");
  Form num = numerator_;
  for (std::size_t b = 0; b < powers_.size(); ++b) {
    if (target[b] < powers_[b]) throw InvalidArgument("cannot lower a denominator power");
    const Polynomial mu = mu_polynomial(layout(), static_cast<int>(b));
    for (int k = powers_[b]; k < target[b]; ++k) num *= mu;
  }
  return SingularForm(target, std::move(num));
}

namespace {

std::vector<int> max_powers(const SingularForm& a, const SingularForm& b) {
  if (a.powers().size() != b.powers().size()) throw InvalidArgument("block count mismatch");
  std::vector<int> t(a.powers().size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::max(a.powers()[i], b.powers()[i]);
  return t;
}

}  // namespace

SingularForm& SingularForm::operator+=(const SingularForm& other) {
  const std::vector<int> t = max_powers(*this, other);
  SingularForm lhs = raised_to(t);
  lhs.numerator_ += other.raised_to(t).numerator_;
  *this = std::move(lhs);
  return *this;
}

SingularForm& SingularForm::operator-=(const SingularForm& other) {
  const std::vector<int> t = max_powers(*this, other);
  SingularForm lhs = raised_to(t);
  lhs.numerator_ -= other.raised_to(t).numerator_;
  *this = std::move(lhs);
  return *this;
}

SingularForm& SingularForm::operator*=(Complex c) {
  numerator_ *= c;
  return *this;
}

SingularForm operator+(SingularForm a, const SingularForm& b) { return a += b; }
SingularForm operator-(SingularForm a, const SingularForm& b) { return a -= b; }
SingularForm operator*(SingularForm a, Complex c) { return a *= c; }

SingularForm operator*(const Polynomial& p, const SingularForm& a) {
  return SingularForm(a.powers(), p * a.numerator());
}

SingularForm operator*(const Form& smooth, const SingularForm& a) { return wedge(smooth, a); }

SingularForm wedge(const SingularForm& a, const SingularForm& b) {
  std::vector<int> p = a.powers();
  if (p.size() != b.powers().size()) throw InvalidArgument("block count mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += b.powers()[i];
  return SingularForm(std::move(p), wedge(a.numerator(), b.numerator()));
}

SingularForm wedge(const SingularForm& a, const Form& b) {
  return SingularForm(a.powers(), wedge(a.numerator(), b));
}

SingularForm wedge(const Form& a, const SingularForm& b) {
  return SingularForm(b.powers(), wedge(a, b.numerator()));
}

SingularForm exterior_derivative(const SingularForm& a) {
  const Layout& layout = a.layout();
  const int blocks = layout.block_count();
  std::vector<Polynomial> mus;
  for (int b = 0; b < blocks; ++b) mus.push_back(mu_polynomial(layout, b));

  Polynomial all = Polynomial::constant(layout.dimension(), 1.0);
  for (const Polynomial& mu : mus) all = all * mu;

  Form num = all * exterior_derivative(a.numerator());
  for (int b = 0; b < blocks; ++b) {
    const int nb = a.power(b);
    if (nb == 0) continue;
    Polynomial others = Polynomial::constant(layout.dimension(), 1.0);
    for (int c = 0; c < blocks; ++c)
      if (c != b) others = others * mus[static_cast<std::size_t>(c)];
    num -= (others * Complex(static_cast<double>(nb))) * wedge(d_mu(layout, b), a.numerator());
  }
  std::vector<int> powers = a.powers();
  for (int& p : powers) ++p;
  return SingularForm(std::move(powers), std::move(num));
}

SingularForm iota_euler(const SingularForm& a, int block) {
  return SingularForm(a.powers(), iota_euler(a.numerator(), block));
}

bool equivalent(const SingularForm& a, const SingularForm& b) { return (a - b).is_zero(); }

EulerDecomposition euler_decompose(const SingularForm& omega) {
  SingularForm sigma = iota_euler(omega) * Complex(0.5);
  const SingularForm alpha = canonical_alpha(omega.codim(), omega.dimension());
  if (!(alpha.layout() == omega.layout()))
    throw InvalidArgument("euler_decompose expects a single normal block starting at x_1");
  SingularForm tau = omega - wedge(alpha, sigma);
  return {std::move(sigma), std::move(tau)};
}

SingularForm canonical_alpha(int m, int n) {
  const Layout layout = Layout::single(n, m);
  return SingularForm(1, d_mu(layout));
}

SingularForm canonical_beta(int m, int n) {
  if (m % 2 != 0) throw InvalidArgument("beta lies in the singular complex only for even codimension");
  const Layout layout = Layout::single(n, m);
  Form num(layout);
  const Frame block = (m == 32) ? ~Frame{0} : ((Frame{1} << m) - 1);
  for (int i = 0; i < m; ++i) {
    const double s = (i % 2 == 0) ? 1.0 : -1.0;
    num.add_term(block & ~(Frame{1} << i), {}, Polynomial::variable(n, i) * Complex(s));
  }
  return SingularForm(m / 2, std::move(num));
}

CanonicalForms canonical_forms(int m, int n) {
  return {canonical_alpha(m, n), canonical_beta(m, n)};
}

Form restrict_to_Y(const Form& omega) {
  const Layout& layout = omega.layout();
  const std::vector<int> normal = layout.normal_coords();
  const Frame normal_mask = frame_of(normal);
  Form r(layout);
  for (const auto& [key, p] : omega.terms()) {
    if (key.frame & normal_mask) continue;
    WindowProduct kept;
    bool vanishes = false;
    for (const WindowFactor& f : key.windows) {
      const bool on_normal = f.arg == WindowFactor::Arg::Radial || layout.block_of(f.index) >= 0;
      if (!on_normal) {
        kept.push_back(f);
        continue;
      }
      // Argument is zero on Y and 0 < inner^2: w = 1, derivatives vanish.
      if (f.window.order > 0) vanishes = true;
    }
    if (vanishes) continue;
    r.add_term(key.frame, kept, p.substitute_zero(normal));
  }
  return r;
}

MorseBott::MorseBott(int m, Polynomial conformal_exponent) : codim(m), phi(std::move(conformal_exponent)) {
  if (m < 1) throw InvalidArgument("codimension must be positive");
}

}  // namespace finpart
