#pragma once

#include <compare>
#include <map>
#include <span>
#include <vector>

#include "finpart/error.hpp"

namespace finpart {

// Exponent vector of a monomial x_1^{e_1} ... x_n^{e_n}.
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}
  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }

  int size() const { return static_cast<int>(exponents.size()); }
  int operator[](int i) const { return exponents[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return exponents[static_cast<std::size_t>(i)]; }
  int total_degree() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);

// Polynomial in n real variables with complex coefficients. Zero
// coefficients are never stored, so the zero polynomial has no terms.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, Complex>;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}

  static Polynomial constant(int n, Complex c);
  static Polynomial variable(int n, int i);
  static Polynomial monomial(int n, const MultiIndex& e, Complex c = 1.0);

  int dimension() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;  // -1 for the zero polynomial
  Complex coefficient(const MultiIndex& e) const;

  // Adds c * x^e, dropping the entry when the sum cancels exactly.
  void add_term(const MultiIndex& e, Complex c);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(Complex c);

  Polynomial derivative(int i) const;
  Complex evaluate(std::span<const double> x) const;

  // Sets x_i = 0 for every listed coordinate.
  Polynomial substitute_zero(std::span<const int> coords) const;

  // Drops monomials whose total degree exceeds max_degree.
  Polynomial truncated(int max_degree) const;

  // Largest |p(x)| bound over the box |x_i| <= radius[i] by the triangle
  // inequality.
  double sup_bound(std::span<const double> radius) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  int n_ = 0;
  TermMap terms_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(Polynomial a, Complex c);
Polynomial operator*(Complex c, Polynomial a);

Polynomial pow(const Polynomial& p, int k);

// Polynomial division by mu = sum_{i in coords} x_i^2. Returns the quotient
// and sets `remainder`; the remainder is zero exactly when mu divides p.
Polynomial divide_by_sum_of_squares(const Polynomial& p, std::span<const int> coords,
                                    Polynomial* remainder);

}  // namespace finpart
