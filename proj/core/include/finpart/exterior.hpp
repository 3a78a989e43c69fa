#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "finpart/polynomial.hpp"
#include "finpart/window.hpp"

namespace finpart {

// Coordinates x_1..x_n (stored 0-based) split into normal blocks, each
// carrying its own Morse-Bott model mu_b = sum_{i in block} x_i^2, and the
// remaining base coordinates. The usual smooth-locus case is a single block
// {0..m-1}; normal crossings use several disjoint blocks.
struct Block {
  int first = 0;
  int size = 0;

  int last() const { return first + size; }  // one past the end
  bool contains(int i) const { return i >= first && i < last(); }
  friend auto operator<=>(const Block&, const Block&) = default;
};

class Layout {
 public:
  Layout() = default;
  Layout(int n, std::vector<Block> blocks);
  // n coordinates, the first m of which form the single normal block.
  static Layout single(int n, int m);

  int dimension() const { return n_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const Block& block(int b) const { return blocks_[static_cast<std::size_t>(b)]; }
  int codim() const { return blocks_.empty() ? 0 : blocks_.front().size; }

  // Block index owning coordinate i, or -1 for base coordinates.
  int block_of(int i) const;
  std::vector<int> normal_coords() const;
  std::vector<int> block_coords(int b) const;
  std::vector<int> base_coords() const;

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  int n_ = 0;
  std::vector<Block> blocks_;
};

// A window factor w^{(k)}(arg) where arg is mu_b (radial, per block) or
// x_j^2 (a single base coordinate).
struct WindowFactor {
  enum class Arg : std::uint8_t { Radial, Coordinate };
  Arg arg = Arg::Radial;
  int index = 0;  // block index or coordinate index
  Window window;

  friend auto operator<=>(const WindowFactor&, const WindowFactor&) = default;
  friend bool operator==(const WindowFactor&, const WindowFactor&) = default;
};

// Sorted multiset of window factors multiplying a term.
using WindowProduct = std::vector<WindowFactor>;

WindowProduct multiply(const WindowProduct& a, const WindowProduct& b);

// dx_{i_1} ^ ... ^ dx_{i_k} with i_1 < ... < i_k, stored as a bitmask.
using Frame = std::uint32_t;

Frame frame_of(const std::vector<int>& indices);
std::vector<int> frame_indices(Frame f);
int frame_degree(Frame f);

// Sign of dx^a ^ dx^b relative to dx^{a|b}; zero when they overlap.
int wedge_sign(Frame a, Frame b);

// Sorts an index list into increasing order; returns the permutation sign,
// or zero if an index repeats.
int normalize_frame(std::vector<int>& indices);

struct TermKey {
  Frame frame = 0;
  WindowProduct windows;

  friend auto operator<=>(const TermKey&, const TermKey&) = default;
  friend bool operator==(const TermKey&, const TermKey&) = default;
};

// Smooth differential form: sum over (frame, windows) of polynomial
// coefficient * window product * dx^frame. Terms sharing a key are merged.
class Form {
 public:
  using TermMap = std::map<TermKey, Polynomial>;

  Form() = default;
  explicit Form(Layout layout) : layout_(std::move(layout)) {}

  static Form scalar(const Layout& layout, const Polynomial& p, WindowProduct w = {});
  static Form differential(const Layout& layout, int i);  // dx_i

  const Layout& layout() const { return layout_; }
  int dimension() const { return layout_.dimension(); }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Degree if homogeneous; -1 for zero, throws if mixed.
  int degree() const;

  void add_term(Frame frame, const WindowProduct& windows, const Polynomial& coeff);

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);
  Form& operator*=(Complex c);
  Form& operator*=(const Polynomial& p);

  // Coefficient of dx^frame with every window evaluated at x.
  Complex component(Frame frame, std::span<const double> x) const;

  friend bool operator==(const Form&, const Form&) = default;

 private:
  Layout layout_;
  TermMap terms_;
};

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator*(Form a, Complex c);
Form operator*(Complex c, Form a);
Form operator*(const Polynomial& p, Form a);

Form wedge(const Form& a, const Form& b);
Form exterior_derivative(const Form& a);
Form iota_euler(const Form& a, int block = 0);

// mu_b and d mu_b as forms on the given layout.
Polynomial mu_polynomial(const Layout& layout, int block = 0);
Form d_mu(const Layout& layout, int block = 0);

// prod_b mu_b^{-N_b} * numerator. For a single block this is mu_0^{-N} eta.
// The power is never reduced automatically.
class SingularForm {
 public:
  SingularForm() = default;
  SingularForm(std::vector<int> powers, Form numerator);
  SingularForm(int power, Form numerator);  // single block

  const Form& numerator() const { return numerator_; }
  const std::vector<int>& powers() const { return powers_; }
  int power(int block = 0) const { return powers_[static_cast<std::size_t>(block)]; }
  const Layout& layout() const { return numerator_.layout(); }
  int dimension() const { return layout().dimension(); }
  int codim() const { return layout().codim(); }
  bool is_zero() const { return numerator_.is_zero(); }
  int degree() const { return numerator_.degree(); }

  // Same form written over mu_b^{target_b}; target must not be smaller.
  SingularForm raised_to(const std::vector<int>& target) const;

  SingularForm& operator+=(const SingularForm& other);
  SingularForm& operator-=(const SingularForm& other);
  SingularForm& operator*=(Complex c);

 private:
  std::vector<int> powers_;
  Form numerator_;
};

SingularForm operator+(SingularForm a, const SingularForm& b);
SingularForm operator-(SingularForm a, const SingularForm& b);
SingularForm operator*(SingularForm a, Complex c);
SingularForm operator*(const Polynomial& p, const SingularForm& a);
SingularForm operator*(const Form& smooth, const SingularForm& a);  // wedge, smooth on the left

SingularForm wedge(const SingularForm& a, const SingularForm& b);
SingularForm wedge(const SingularForm& a, const Form& b);
SingularForm wedge(const Form& a, const SingularForm& b);

// d(mu^{-N} eta) = mu^{-(N+1)} (mu d eta - N d mu ^ eta), blockwise.
SingularForm exterior_derivative(const SingularForm& a);
SingularForm iota_euler(const SingularForm& a, int block = 0);

// True when the two forms agree after bringing them over a common
// denominator (exact coefficient comparison).
bool equivalent(const SingularForm& a, const SingularForm& b);

struct EulerDecomposition {
  SingularForm sigma;
  SingularForm tau;
};

// omega = (d mu / mu) ^ sigma + tau with iota_e sigma = iota_e tau = 0.
EulerDecomposition euler_decompose(const SingularForm& omega);

struct CanonicalForms {
  SingularForm alpha;  // d mu / mu
  SingularForm beta;   // mu^{-m/2} sum (-1)^{i-1} x_i dx_1..^dx_i..dx_m
};

// beta requires even m; for odd m only alpha is defined and requesting
// beta throws.
SingularForm canonical_alpha(int m, int n);
SingularForm canonical_beta(int m, int n);
CanonicalForms canonical_forms(int m, int n);

// Restriction of a smooth form to Y = {normal coordinates = 0}: normal
// variables set to zero, radial windows evaluated at mu = 0, frames
// touching the normal block dropped.
Form restrict_to_Y(const Form& omega);

// Conformal class representative mu = exp(2 phi) * mu_0.
struct MorseBott {
  int codim = 1;
  Polynomial phi;

  MorseBott() = default;
  MorseBott(int m, Polynomial conformal_exponent);
  static MorseBott standard(int n, int m) { return MorseBott(m, Polynomial(n)); }
  bool is_standard() const { return phi.is_zero(); }
};

}  // namespace finpart
