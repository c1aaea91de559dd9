#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace fqo {

using Rational = mpq_class;

// p/q in lowest terms (the two-argument mpq constructor does not reduce).
inline Rational rat(long p, long q = 1) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

// Accepts "p/q", integers and plain decimals ("0.25"); the result is exact.
Rational parse_rational(std::string_view text);
// Always "num/den", also for integers, so serialized output has one shape.
std::string format_rational(const Rational& value);
double to_double(const Rational& value);
// Exact square root when value is the square of a rational.
bool exact_sqrt(const Rational& value, Rational& root);

class TPoly {
 public:
  TPoly() : coeffs_(1) {}
  explicit TPoly(int order) : coeffs_(static_cast<std::size_t>(order) + 1) {}
  TPoly(const Rational& constant, int order);
  static TPoly variable(int order);
  static TPoly from_coefficients(std::vector<Rational> coeffs, int order);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Rational& operator[](int k) const;
  Rational& at(int k) { return coeffs_.at(static_cast<std::size_t>(k)); }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  bool is_zero() const;
  Rational evaluate(const Rational& t) const;

  TPoly operator-() const;
  TPoly& operator+=(const TPoly& other);
  TPoly& operator-=(const TPoly& other);
  TPoly& operator*=(const TPoly& other);
  TPoly& operator*=(const Rational& factor);
  friend TPoly operator+(TPoly a, const TPoly& b) { return a += b; }
  friend TPoly operator-(TPoly a, const TPoly& b) { return a -= b; }
  friend TPoly operator*(TPoly a, const TPoly& b) { return a *= b; }
  friend TPoly operator*(TPoly a, const Rational& b) { return a *= b; }
  friend TPoly operator*(const Rational& b, TPoly a) { return a *= b; }
  friend bool operator==(const TPoly& a, const TPoly& b);
  friend bool operator!=(const TPoly& a, const TPoly& b) { return !(a == b); }

  // Series inverse; requires a nonzero constant term.
  TPoly inverse() const;
  // Series square root; requires a constant term that is a positive rational square.
  TPoly sqrt() const;
  TPoly truncated(int order) const;

 private:
  std::vector<Rational> coeffs_;
};

// Uniform coefficient interface used by the formal algebra templates.
inline bool is_zero(const Rational& c) { return sgn(c) == 0; }
inline bool is_zero(const TPoly& c) { return c.is_zero(); }
inline Rational invert(const Rational& c) { return Rational(1) / c; }
inline TPoly invert(const TPoly& c) { return c.inverse(); }
inline bool invertible(const Rational& c) { return sgn(c) != 0; }
inline bool invertible(const TPoly& c) { return sgn(c[0]) != 0; }
inline Rational constant_term(const Rational& c) { return c; }
inline Rational constant_term(const TPoly& c) { return c[0]; }
bool coefficient_sqrt(const Rational& c, Rational& root);
bool coefficient_sqrt(const TPoly& c, TPoly& root);
double coefficient_magnitude(const Rational& c);
double coefficient_magnitude(const TPoly& c);

template <class C>
C make_coeff(const Rational& value, int torder);
template <>
inline Rational make_coeff<Rational>(const Rational& value, int) { return value; }
template <>
inline TPoly make_coeff<TPoly>(const Rational& value, int torder) { return TPoly(value, torder); }

}  // namespace fqo
