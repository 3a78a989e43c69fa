#include "finpart/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace finpart {

int MultiIndex::total_degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw InvalidArgument("multi-index length mismatch");
  MultiIndex r = a;
  for (int i = 0; i < a.size(); ++i) r[i] += b[i];
  return r;
}

Polynomial Polynomial::constant(int n, Complex c) {
  Polynomial p(n);
  p.add_term(MultiIndex::zero(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  MultiIndex e = MultiIndex::zero(n);
  e[i] = 1;
  return monomial(n, e, 1.0);
}

Polynomial Polynomial::monomial(int n, const MultiIndex& e, Complex c) {
  if (e.size() != n) throw InvalidArgument("monomial length does not match dimension");
  for (int v : e.exponents)
    if (v < 0) throw InvalidArgument("negative exponent");
  Polynomial p(n);
  p.add_term(e, c);
  return p;
}

int Polynomial::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.total_degree());
  return d;
}

Complex Polynomial::coefficient(const MultiIndex& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Complex{} : it->second;
}

void Polynomial::add_term(const MultiIndex& e, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.is_zero()) return *this;
  if (n_ != other.n_) {
    if (is_zero()) n_ = other.n_;
    else throw InvalidArgument("polynomial dimension mismatch");
  }
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.is_zero()) return *this;
  if (n_ != other.n_) {
    if (is_zero()) n_ = other.n_;
    else throw InvalidArgument("polynomial dimension mismatch");
  }
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(Complex c) {
  if (c == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (it->second == Complex{}) it = terms_.erase(it);
    else ++it;
  }
  return *this;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial r(n_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    MultiIndex f = e;
    f[i] -= 1;
    r.add_term(f, c * static_cast<double>(e[i]));
  }
  return r;
}

Complex Polynomial::evaluate(std::span<const double> x) const {
  Complex sum{};
  for (const auto& [e, c] : terms_) {
    double m = 1.0;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < e[i]; ++k) m *= x[static_cast<std::size_t>(i)];
    sum += c * m;
  }
  return sum;
}

Polynomial Polynomial::substitute_zero(std::span<const int> coords) const {
  Polynomial r(n_);
  for (const auto& [e, c] : terms_) {
    bool vanishes = false;
    for (int i : coords)
      if (e[i] != 0) vanishes = true;
    if (!vanishes) r.add_term(e, c);
  }
  return r;
}

Polynomial Polynomial::truncated(int max_degree) const {
  Polynomial r(n_);
  for (const auto& [e, c] : terms_)
    if (e.total_degree() <= max_degree) r.add_term(e, c);
  return r;
}

double Polynomial::sup_bound(std::span<const double> radius) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = std::abs(c);
    for (int i = 0; i < n_; ++i) m *= std::pow(radius[static_cast<std::size_t>(i)], e[i]);
    s += m;
  }
  return s;
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
Polynomial operator-(Polynomial a) { return a *= -1.0; }
Polynomial operator*(Polynomial a, Complex c) { return a *= c; }
Polynomial operator*(Complex c, Polynomial a) { return a *= c; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial(std::max(a.dimension(), b.dimension()));
  if (a.dimension() != b.dimension()) throw InvalidArgument("polynomial dimension mismatch");
  Polynomial r(a.dimension());
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) r.add_term(ea + eb, ca * cb);
  return r;
}

Polynomial pow(const Polynomial& p, int k) {
  Polynomial r = Polynomial::constant(p.dimension(), 1.0);
  for (int i = 0; i < k; ++i) r = r * p;
  return r;
}

Polynomial divide_by_sum_of_squares(const Polynomial& p, std::span<const int> coords,
                                    Polynomial* remainder) {
  const int n = p.dimension();
  if (coords.empty()) throw InvalidArgument("empty coordinate block");
  // Long division in the last block variable: mu is monic of degree 2 there.
  const int lead = coords.back();
  Polynomial rest = p;
  Polynomial quotient(n);
  while (true) {
    // Pick any term with x_lead degree >= 2.
    const MultiIndex* pick = nullptr;
    Complex c{};
    for (const auto& [e, v] : rest.terms()) {
      if (e[lead] >= 2) {
        pick = &e;
        c = v;
        break;
      }
    }
    if (pick == nullptr) break;
    MultiIndex q = *pick;
    q[lead] -= 2;
    Polynomial qt = Polynomial::monomial(n, q, c);
    quotient += qt;
    Polynomial mu(n);
    for (int i : coords) {
      MultiIndex sq = MultiIndex::zero(n);
      sq[i] = 2;
      mu.add_term(sq, 1.0);
    }
    rest -= qt * mu;
  }
  if (remainder) *remainder = rest;
  return quotient;
}

}  // namespace finpart
