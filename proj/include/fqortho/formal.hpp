#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fqortho/errors.hpp"
#include "fqortho/rational.hpp"

namespace fqo {

inline constexpr int kMaxFormalN = 4;
inline constexpr int kMaxFormalDegree = 8;

template <class E>
using Tuple = std::vector<E>;

// Perturbation letters r_{j,iota} are numbered (j-1)*2^n + code(iota) where
// code reads iota_1 as the most significant bit; iota masks keep iota_h in bit h-1.
int letter_count(int n);
int letter_index(int n, int j, unsigned iota);
int letter_generator(int n, int letter);
unsigned letter_iota(int n, int letter);
unsigned iota_code(int n, unsigned iota);
unsigned iota_from_code(int n, unsigned code);
std::string mask_bits(int n, unsigned mask);
unsigned parse_mask_bits(int n, std::string_view bits);
// Q^a Q^b = sign * Q^(a xor b) for ascending blades with Q_i^2 = -1.
int blade_product_sign(unsigned a, unsigned b);

class Word {
 public:
  Word() = default;
  static Word make(int n, const std::vector<int>& letters, unsigned qmask);
  static Word blade(int n, unsigned qmask) { return make(n, {}, qmask); }

  int n() const { return static_cast<int>((key_ >> 4) & 0xF); }
  int degree() const { return static_cast<int>(key_ >> 60); }
  unsigned qmask() const { return static_cast<unsigned>(key_ & 0xF); }
  int letter(int i) const { return static_cast<int>((key_ >> (54 - 6 * i)) & 0x3F); }
  std::vector<int> letters() const;
  std::uint64_t key() const { return key_; }
  Word with_qmask(unsigned qmask) const { return from_key((key_ & ~std::uint64_t{0xF}) | qmask); }
  static Word from_key(std::uint64_t key) {
    Word w;
    w.key_ = key;
    return w;
  }
  std::string to_string() const;

  friend bool operator==(const Word& a, const Word& b) { return a.key_ == b.key_; }
  friend bool operator!=(const Word& a, const Word& b) { return a.key_ != b.key_; }
  friend bool operator<(const Word& a, const Word& b) { return a.key_ < b.key_; }

 private:
  std::uint64_t key_ = 0;
};

std::pair<int, Word> mono_mul(const Word& a, const Word& b);
// (Q^kappa)^{-1} w Q^kappa = sign * w.
int blade_conjugation_sign(const Word& w, unsigned kappa);

template <class C>
class BasicFormal {
 public:
  using Coeff = C;
  using Term = std::pair<Word, C>;

  BasicFormal() = default;
  BasicFormal(int n, int cap, int torder = 0) : n_(n), cap_(cap), torder_(torder) {
    if (n < 1 || n > kMaxFormalN) fail("BadShape", "formal n must lie in 1..4");
    if (cap < 0 || cap > kMaxFormalDegree) fail("BadShape", "degree cap must lie in 0..8");
  }

  static BasicFormal monomial(int n, int cap, const Word& w, const C& c, int torder = 0) {
    BasicFormal x(n, cap, torder);
    if (w.degree() <= cap && !fqo::is_zero(c)) x.terms_.push_back({w, c});
    return x;
  }
  static BasicFormal scalar(int n, int cap, const Rational& value, int torder = 0) {
    return monomial(n, cap, Word::blade(n, 0), make_coeff<C>(value, torder), torder);
  }
  static BasicFormal one(int n, int cap, int torder = 0) { return scalar(n, cap, 1, torder); }
  static BasicFormal blade(int n, int cap, unsigned kappa, int torder = 0) {
    return monomial(n, cap, Word::blade(n, kappa), make_coeff<C>(1, torder), torder);
  }
  static BasicFormal generator(int n, int cap, int h, int torder = 0) {
    return blade(n, cap, 1u << (h - 1), torder);
  }
  static BasicFormal letter(int n, int cap, int j, unsigned iota, int torder = 0) {
    return monomial(n, cap, Word::make(n, {letter_index(n, j, iota)}, 0), make_coeff<C>(1, torder),
                    torder);
  }
  static BasicFormal from_terms(int n, int cap, int torder, std::vector<Term> terms) {
    BasicFormal x(n, cap, torder);
    x.terms_ = std::move(terms);
    x.normalize();
    return x;
  }

  int n() const { return n_; }
  int cap() const { return cap_; }
  int torder() const { return torder_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  C make(const Rational& value) const { return make_coeff<C>(value, torder_); }
  BasicFormal zero() const { return BasicFormal(n_, cap_, torder_); }
  BasicFormal unit() const { return one(n_, cap_, torder_); }

  C coefficient(const Word& w) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), w,
                               [](const Term& t, const Word& key) { return t.first < key; });
    if (it != terms_.end() && it->first == w) return it->second;
    return make(0);
  }

  int min_degree() const { return terms_.empty() ? cap_ + 1 : terms_.front().first.degree(); }

  BasicFormal degree_part(int lo, int hi) const {
    BasicFormal out(n_, cap_, torder_);
    for (const auto& t : terms_)
      if (t.first.degree() >= lo && t.first.degree() <= hi) out.terms_.push_back(t);
    return out;
  }
  BasicFormal degree_part(int d) const { return degree_part(d, d); }

  BasicFormal truncated(int cap) const {
    BasicFormal out(n_, cap, torder_);
    for (const auto& t : terms_)
      if (t.first.degree() <= cap) out.terms_.push_back(t);
    return out;
  }

  template <class F>
  BasicFormal map_coefficients(F&& f) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({t.first, f(t.first, t.second)});
    return from_terms(n_, cap_, torder_, std::move(out));
  }

  BasicFormal operator-() const {
    BasicFormal out(*this);
    for (auto& t : out.terms_) t.second = -t.second;
    return out;
  }

  BasicFormal& operator+=(const BasicFormal& other) { return merge(other, 1); }
  BasicFormal& operator-=(const BasicFormal& other) { return merge(other, -1); }
  friend BasicFormal operator+(BasicFormal a, const BasicFormal& b) { return a += b; }
  friend BasicFormal operator-(BasicFormal a, const BasicFormal& b) { return a -= b; }

  friend BasicFormal operator*(const BasicFormal& a, const BasicFormal& b) {
    a.check_compatible(b);
    std::unordered_map<std::uint64_t, C> acc;
    acc.reserve(a.terms_.size() + b.terms_.size());
    C product = a.make(0);
    for (const auto& [wa, ca] : a.terms_) {
      int room = a.cap_ - wa.degree();
      for (const auto& [wb, cb] : b.terms_) {
        if (wb.degree() > room) break;
        auto [sign, w] = mono_mul(wa, wb);
        product = ca;
        product *= cb;
        auto [it, fresh] = acc.try_emplace(w.key(), a.make(0));
        if (sign > 0)
          it->second += product;
        else
          it->second -= product;
      }
    }
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (auto& [key, c] : acc)
      if (!fqo::is_zero(c)) terms.push_back({Word::from_key(key), std::move(c)});
    std::sort(terms.begin(), terms.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    BasicFormal out(a.n_, a.cap_, a.torder_);
    out.terms_ = std::move(terms);
    return out;
  }

  BasicFormal scaled(const C& factor) const {
    if (fqo::is_zero(factor)) return zero();
    BasicFormal out(*this);
    for (auto& t : out.terms_) t.second *= factor;
    out.drop_zeros();
    return out;
  }

  // (Q^kappa)^{-1} x Q^kappa, a sign pass over the words.
  BasicFormal conjugated_by_blade(unsigned kappa) const {
    BasicFormal out(*this);
    for (auto& t : out.terms_)
      if (blade_conjugation_sign(t.first, kappa) < 0) t.second = -t.second;
    return out;
  }

  friend bool operator==(const BasicFormal& a, const BasicFormal& b) {
    if (a.n_ != b.n_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].first != b.terms_[i].first || a.terms_[i].second != b.terms_[i].second)
        return false;
    return true;
  }
  friend bool operator!=(const BasicFormal& a, const BasicFormal& b) { return !(a == b); }

  void check_compatible(const BasicFormal& other) const {
    if (n_ != other.n_ || cap_ != other.cap_)
      fail("MismatchedShape", "formal operands differ in n or degree cap");
  }

 private:
  BasicFormal& merge(const BasicFormal& other, int sign) {
    check_compatible(other);
    std::vector<Term> out;
    out.reserve(terms_.size() + other.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < other.terms_.size()) {
      if (j == other.terms_.size() || (i < terms_.size() && terms_[i].first < other.terms_[j].first)) {
        out.push_back(std::move(terms_[i++]));
      } else if (i == terms_.size() || other.terms_[j].first < terms_[i].first) {
        C c = other.terms_[j].second;
        if (sign < 0) c = -c;
        out.push_back({other.terms_[j].first, std::move(c)});
        ++j;
      } else {
        C c = std::move(terms_[i].second);
        if (sign > 0)
          c += other.terms_[j].second;
        else
          c -= other.terms_[j].second;
        if (!fqo::is_zero(c)) out.push_back({terms_[i].first, std::move(c)});
        ++i;
        ++j;
      }
    }
    terms_ = std::move(out);
    return *this;
  }

  void drop_zeros() {
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [](const Term& t) { return fqo::is_zero(t.second); }),
                 terms_.end());
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    std::vector<Term> out;
    for (auto& t : terms_) {
      if (t.first.degree() > cap_) continue;
      if (!out.empty() && out.back().first == t.first)
        out.back().second += t.second;
      else
        out.push_back(std::move(t));
    }
    terms_ = std::move(out);
    drop_zeros();
  }

  int n_ = 0;
  int cap_ = 0;
  int torder_ = 0;
  std::vector<Term> terms_;
};

using FormalElement = BasicFormal<Rational>;
using TFormalElement = BasicFormal<TPoly>;

template <class C>
BasicFormal<C> scale(const BasicFormal<C>& x, const Rational& factor) {
  return x.scaled(x.make(factor));
}
inline TFormalElement scale(const TFormalElement& x, const TPoly& factor) { return x.scaled(factor); }

template <class C>
BasicFormal<C> one_like(const BasicFormal<C>& x) {
  return x.unit();
}
template <class C>
BasicFormal<C> zero_like(const BasicFormal<C>& x) {
  return x.zero();
}

template <class C>
double magnitude(const BasicFormal<C>& x) {
  double m = 0;
  for (const auto& t : x.terms()) m = std::max(m, coefficient_magnitude(t.second));
  return m;
}

// Letter-degree 0 part with coefficients reduced to their t^0 terms: the Clifford base.
template <class C>
BasicFormal<C> constant_part(const BasicFormal<C>& x) {
  std::vector<typename BasicFormal<C>::Term> terms;
  for (const auto& [w, c] : x.terms())
    if (w.degree() == 0) terms.push_back({w, x.make(constant_term(c))});
  return BasicFormal<C>::from_terms(x.n(), x.cap(), x.torder(), std::move(terms));
}

// If x = c * Q^kappa for a single blade, reports it.
template <class C>
bool single_blade(const BasicFormal<C>& x, unsigned& kappa, C& coeff) {
  if (x.size() != 1 || x.terms()[0].first.degree() != 0) return false;
  kappa = x.terms()[0].first.qmask();
  coeff = x.terms()[0].second;
  return true;
}

// Inverse inside the 2^n-dimensional Clifford subalgebra by Gaussian elimination.
template <class C>
BasicFormal<C> clifford_inverse(const BasicFormal<C>& x0) {
  const int n = x0.n();
  const unsigned dim = 1u << n;
  std::vector<std::vector<C>> m(dim, std::vector<C>(dim + 1, x0.make(0)));
  for (const auto& [w, c] : x0.terms()) {
    if (w.degree() != 0) fail("BadDecomposition", "clifford_inverse expects a degree-0 element");
    for (unsigned col = 0; col < dim; ++col) {
      int s = blade_product_sign(w.qmask(), col);
      C term = c;
      if (s < 0) term = -term;
      m[w.qmask() ^ col][col] += term;
    }
  }
  m[0][dim] = x0.make(1);
  for (unsigned col = 0; col < dim; ++col) {
    unsigned pivot = dim;
    for (unsigned r = col; r < dim; ++r)
      if (invertible(m[r][col])) {
        pivot = r;
        break;
      }
    if (pivot == dim) fail("SingularLeadingTerm", "degree-0 part is not invertible");
    std::swap(m[pivot], m[col]);
    C inv = invert(m[col][col]);
    for (unsigned k = col; k <= dim; ++k) m[col][k] *= inv;
    for (unsigned r = 0; r < dim; ++r) {
      if (r == col || is_zero(m[r][col])) continue;
      C f = m[r][col];
      for (unsigned k = col; k <= dim; ++k) {
        C t = f;
        t *= m[col][k];
        m[r][k] -= t;
      }
    }
  }
  std::vector<typename BasicFormal<C>::Term> terms;
  for (unsigned k = 0; k < dim; ++k)
    if (!is_zero(m[k][dim])) terms.push_back({Word::blade(n, k), m[k][dim]});
  return BasicFormal<C>::from_terms(n, x0.cap(), x0.torder(), std::move(terms));
}

template <class C>
BasicFormal<C> inverse(const BasicFormal<C>& x) {
  BasicFormal<C> x0 = x.degree_part(0);
  BasicFormal<C> x0inv = clifford_inverse(x0);
  BasicFormal<C> u = x0inv * (x - x0);
  BasicFormal<C> acc = x0inv;
  BasicFormal<C> power = x0inv;
  for (int k = 1; k <= x.cap(); ++k) {
    power = -(u * power);
    if (power.is_zero()) break;
    acc += power;
  }
  return acc;
}

template <class C>
BasicFormal<C> exp_formal(const BasicFormal<C>& x) {
  if (!x.degree_part(0).is_zero()) fail("NonNilpotentArgument", "exp needs a zero degree-0 part");
  BasicFormal<C> acc = x.unit();
  BasicFormal<C> power = x.unit();
  for (int k = 1; k <= x.cap(); ++k) {
    power = scale(power * x, Rational(1, k));
    if (power.is_zero()) break;
    acc += power;
  }
  return acc;
}

// (c(1 + T))^{-1/2} for a degree-0 part c*1 with an exact square root.
template <class C>
BasicFormal<C> inv_sqrt_formal(const BasicFormal<C>& s) {
  BasicFormal<C> s0 = s.degree_part(0);
  unsigned kappa = 0;
  C c = s.make(0);
  if (!single_blade(s0, kappa, c) || kappa != 0)
    fail("BadLeadingTerm", "degree-0 part must be a scalar multiple of 1");
  C root = s.make(0);
  if (!coefficient_sqrt(c, root)) fail("BadLeadingTerm", "degree-0 scalar has no exact square root");
  C cinv = invert(c);
  BasicFormal<C> t = s.scaled(cinv) - s.unit();
  BasicFormal<C> acc = s.unit();
  BasicFormal<C> power = s.unit();
  Rational binom(1);
  for (int r = 1; r <= s.cap(); ++r) {
    binom *= Rational(-1, 2) - (r - 1);
    binom /= r;
    power = power * t;
    if (power.is_zero()) break;
    acc += scale(power, binom);
  }
  return acc.scaled(invert(root));
}

// pol(x) = x (-x^2)^{-1/2}; the degree-0 part must square to a negative scalar.
template <class C>
BasicFormal<C> pol_general(const BasicFormal<C>& x) {
  return x * inv_sqrt_formal(-(x * x));
}

template <class C>
BasicFormal<C> pol_formal(const BasicFormal<C>& a, int k) {
  BasicFormal<C> q = BasicFormal<C>::generator(a.n(), a.cap(), k, a.torder());
  if (a.degree_part(0) != q) fail("BadDecomposition", "degree-0 part differs from the base generator");
  return pol_general(a);
}

template <class C>
Tuple<BasicFormal<C>> base_generators(int n, int cap, int torder = 0) {
  Tuple<BasicFormal<C>> q;
  for (int h = 1; h <= n; ++h) q.push_back(BasicFormal<C>::generator(n, cap, h, torder));
  return q;
}

// A_j = Q_j + sum_iota r_{j,iota} Q_j, the universal perturbation of the base system.
template <class C>
Tuple<BasicFormal<C>> generic_input(int n, int cap, int torder = 0) {
  Tuple<BasicFormal<C>> a = base_generators<C>(n, cap, torder);
  for (int j = 1; j <= n; ++j) {
    BasicFormal<C> r(n, cap, torder);
    for (unsigned iota = 0; iota < (1u << n); ++iota) r += BasicFormal<C>::letter(n, cap, j, iota, torder);
    a[j - 1] += r * a[j - 1];
  }
  return a;
}

template <class C>
Tuple<BasicFormal<C>> truncate_tuple(const Tuple<BasicFormal<C>>& a, int cap) {
  Tuple<BasicFormal<C>> out;
  for (const auto& x : a) out.push_back(x.truncated(cap));
  return out;
}

}  // namespace fqo
