#include "fqortho/rational.hpp"

#include <algorithm>
#include <cmath>

#include "fqortho/errors.hpp"

namespace fqo {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }),
          s.end());
  if (s.empty()) fail("BadRational", "empty string", ErrorClass::input);
  try {
    auto dot = s.find('.');
    if (dot != std::string::npos && s.find('/') == std::string::npos) {
      bool negative = s[0] == '-';
      std::string digits = s.substr(negative || s[0] == '+' ? 1 : 0);
      dot = digits.find('.');
      std::string whole = digits.substr(0, dot);
      std::string frac = digits.substr(dot + 1);
      if (whole.empty()) whole = "0";
      mpz_class num(whole + frac);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
      Rational r(num, den);
      r.canonicalize();
      return negative ? Rational(-r) : r;
    }
    Rational r(s);
    if (r.get_den() == 0) fail("BadRational", "zero denominator in '" + s + "'", ErrorClass::input);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    fail("BadRational", "cannot parse '" + s + "'", ErrorClass::input);
  }
}

std::string format_rational(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

bool exact_sqrt(const Rational& value, Rational& root) {
  if (sgn(value) < 0) return false;
  mpz_class num = value.get_num();
  mpz_class den = value.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  root = Rational(rn, rd);
  root.canonicalize();
  return true;
}

TPoly::TPoly(const Rational& constant, int order) : coeffs_(static_cast<std::size_t>(order) + 1) {
  coeffs_[0] = constant;
}

TPoly TPoly::variable(int order) {
  TPoly t(order);
  if (order >= 1) t.coeffs_[1] = 1;
  return t;
}

TPoly TPoly::from_coefficients(std::vector<Rational> coeffs, int order) {
  TPoly t(order);
  for (std::size_t k = 0; k < coeffs.size() && k < t.coeffs_.size(); ++k) t.coeffs_[k] = coeffs[k];
  return t;
}

const Rational& TPoly::operator[](int k) const {
  static const Rational zero(0);
  if (k < 0 || k > order()) return zero;
  return coeffs_[static_cast<std::size_t>(k)];
}

bool TPoly::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

Rational TPoly::evaluate(const Rational& t) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

TPoly TPoly::operator-() const {
  TPoly out(*this);
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

TPoly& TPoly::operator+=(const TPoly& other) {
  if (other.order() < order()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

TPoly& TPoly::operator-=(const TPoly& other) {
  if (other.order() < order()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

TPoly& TPoly::operator*=(const TPoly& other) {
  int top = std::min(order(), other.order());
  std::vector<Rational> out(static_cast<std::size_t>(top) + 1);
  for (int i = 0; i <= top; ++i) {
    if (sgn(coeffs_[i]) == 0) continue;
    for (int j = 0; i + j <= top; ++j) out[i + j] += coeffs_[i] * other.coeffs_[j];
  }
  coeffs_ = std::move(out);
  return *this;
}

TPoly& TPoly::operator*=(const Rational& factor) {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

bool operator==(const TPoly& a, const TPoly& b) {
  int top = std::max(a.order(), b.order());
  for (int k = 0; k <= top; ++k)
    if (a[k] != b[k]) return false;
  return true;
}

TPoly TPoly::inverse() const {
  if (sgn(coeffs_[0]) == 0) fail("SingularLeadingTerm", "power series with zero constant term");
  TPoly out(order());
  Rational inv0 = Rational(1) / coeffs_[0];
  out.coeffs_[0] = inv0;
  for (int k = 1; k <= order(); ++k) {
    Rational acc(0);
    for (int i = 1; i <= k; ++i) acc += coeffs_[i] * out.coeffs_[k - i];
    out.coeffs_[k] = -acc * inv0;
  }
  return out;
}

TPoly TPoly::sqrt() const {
  Rational root0;
  if (sgn(coeffs_[0]) <= 0 || !exact_sqrt(coeffs_[0], root0))
    fail("BadLeadingTerm", "constant term has no exact positive square root");
  TPoly out(order());
  out.coeffs_[0] = root0;
  for (int k = 1; k <= order(); ++k) {
    Rational acc = coeffs_[k];
    for (int i = 1; i < k; ++i) acc -= out.coeffs_[i] * out.coeffs_[k - i];
    out.coeffs_[k] = acc / (2 * root0);
  }
  return out;
}

TPoly TPoly::truncated(int order) const {
  TPoly out(order);
  for (int k = 0; k <= order; ++k) out.coeffs_[k] = (*this)[k];
  return out;
}

bool coefficient_sqrt(const Rational& c, Rational& root) { return sgn(c) > 0 && exact_sqrt(c, root); }

bool coefficient_sqrt(const TPoly& c, TPoly& root) {
  Rational r0;
  if (sgn(c[0]) <= 0 || !exact_sqrt(c[0], r0)) return false;
  root = c.sqrt();
  return true;
}

double coefficient_magnitude(const Rational& c) { return std::fabs(c.get_d()); }

double coefficient_magnitude(const TPoly& c) {
  double m = 0;
  for (const auto& x : c.coefficients()) m = std::max(m, std::fabs(x.get_d()));
  return m;
}

}  // namespace fqo
