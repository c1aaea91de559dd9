#include "fqortho/omega.hpp"

#include <algorithm>
#include <numeric>

namespace fqo {

void table_cost_guard(int n, int max_r) {
  if (n < 1 || n > 3) fail("CostGuard", "coefficient tables are limited to n <= 3", ErrorClass::input);
  if (max_r < 0 || max_r > 3) fail("CostGuard", "coefficient tables are limited to degree <= 3", ErrorClass::input);
}

// ---------------------------------------------------------------------------
// free coefficient data

namespace {

void check_letters(int n, const std::vector<int>& letters) {
  for (int l : letters) {
    if (l < 0 || l >= letter_count(n)) fail("BadIndex", "letter index out of range", ErrorClass::input);
    if (!gs_admissible_letter(n, l))
      fail("InadmissibleIndex",
           "letter r" + std::to_string(l + 1) + " has j = min{h : iota_h = 1} and vanishes in the GS gauge",
           ErrorClass::input);
  }
}

unsigned letter_type(int n, const std::vector<int>& letters) {
  unsigned x = 0;
  for (int l : letters) x ^= letter_iota(n, l);
  return x;
}

FormalElement blade_of(const Tuple<FormalElement>& q, unsigned kappa) {
  FormalElement x = one_like(q[0]);
  for (std::size_t h = 0; h < q.size(); ++h)
    if (kappa & (1u << h)) x = x * q[h];
  return x;
}

struct GaugeComponents {
  Tuple<FormalElement> q;
  std::vector<std::vector<FormalElement>> comps;  // [j-1][iota]

  const FormalElement& letter(int l) const {
    const int n = static_cast<int>(q.size());
    return comps[static_cast<std::size_t>(letter_generator(n, l) - 1)][letter_iota(n, l)];
  }
  FormalElement word(const std::vector<int>& letters) const {
    FormalElement x = one_like(q[0]);
    for (int l : letters) x = x * letter(l);
    return x;
  }
};

GaugeComponents gs_gauge(const Tuple<FormalElement>& a) {
  GaugeComponents g;
  g.q = gs_chain(a);
  g.comps = decompose(tuple_sub(a, g.q), g.q, false).right;
  return g;
}

}  // namespace

OperationData OperationData::unit(int n) {
  OperationData p;
  p.n = n;
  for (int k = 1; k <= n; ++k) p.coeffs[{k, {}, 0u}] = 1;
  return p;
}

OperationData OperationData::from_table(const RationalTable& t) {
  OperationData p;
  p.n = t.n;
  for (int k = 1; k <= t.n; ++k)
    for (const auto& [key, c] : t.entries[static_cast<std::size_t>(k - 1)]) {
      bool ok = std::all_of(key.first.begin(), key.first.end(), [&](int l) { return gs_admissible_letter(t.n, l); });
      if (ok) p.coeffs[{k, key.first, key.second}] = c;
    }
  return p;
}

void OperationData::set(int k, const std::vector<int>& letters, unsigned kappa, const Rational& v) {
  if (k < 1 || k > n) fail("BadIndex", "output index out of range", ErrorClass::input);
  if (kappa >= (1u << n)) fail("BadIndex", "sign index out of range", ErrorClass::input);
  check_letters(n, letters);
  if (sgn(v) == 0)
    coeffs.erase({k, letters, kappa});
  else
    coeffs[{k, letters, kappa}] = v;
}

int OperationData::max_degree() const {
  int d = 0;
  for (const auto& [key, c] : coeffs) d = std::max(d, static_cast<int>(std::get<1>(key).size()));
  return d;
}

void OrthogonalizationData::set(const std::vector<int>& letters, const Rational& v) {
  if (letters.empty()) fail("InadmissibleIndex", "exponents start at degree 1", ErrorClass::input);
  check_letters(n, letters);
  if (letter_type(n, letters) == 0)
    fail("InadmissibleIndex", "letter types sum to zero; the term commutes with every Q_i", ErrorClass::input);
  if (sgn(v) == 0)
    coeffs.erase(letters);
  else
    coeffs[letters] = v;
}

int OrthogonalizationData::max_degree() const {
  int d = 0;
  for (const auto& [key, c] : coeffs) d = std::max(d, static_cast<int>(key.size()));
  return d;
}

Tuple<FormalElement> custom_fq_eval(const OperationData& p, const Tuple<FormalElement>& a) {
  if (static_cast<int>(a.size()) != p.n) fail("BadShape", "data and input sizes differ", ErrorClass::input);
  GaugeComponents g = gs_gauge(a);
  Tuple<FormalElement> out(a.size(), zero_like(a[0]));
  for (const auto& [key, c] : p.coeffs) {
    const auto& [k, letters, kappa] = key;
    if (static_cast<int>(letters.size()) > a[0].cap()) continue;
    out[static_cast<std::size_t>(k - 1)] += scale(g.word(letters) * blade_of(g.q, kappa), c);
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = out[k] * g.q[k];
  return out;
}

Tuple<FormalElement> custom_orth_eval(const OrthogonalizationData& p, const Tuple<FormalElement>& a) {
  if (static_cast<int>(a.size()) != p.n) fail("BadShape", "data and input sizes differ", ErrorClass::input);
  GaugeComponents g = gs_gauge(a);
  const int top = std::min(p.max_degree(), a[0].cap());
  std::vector<FormalElement> exponents(static_cast<std::size_t>(top) + 1, zero_like(a[0]));
  for (const auto& [letters, c] : p.coeffs)
    if (static_cast<int>(letters.size()) <= top) exponents[letters.size()] += scale(g.word(letters), c);
  Tuple<FormalElement> out = g.q;
  for (int r = top; r >= 1; --r)
    if (!exponents[static_cast<std::size_t>(r)].is_zero()) out = Ad(exp_formal(exponents[static_cast<std::size_t>(r)]), out);
  return out;
}

// ---------------------------------------------------------------------------
// counts

CountKind parse_count_kind(const std::string& name) {
  if (name == "fq-op") return CountKind::fq_op;
  if (name == "fq-op-vl") return CountKind::fq_op_vl;
  if (name == "fq-orth") return CountKind::fq_orth;
  if (name == "conform-op") return CountKind::conform_op;
  if (name == "conform-op-vl") return CountKind::conform_op_vl;
  if (name == "conform-orth") return CountKind::conform_orth;
  fail("BadOption", "unknown count kind " + name, ErrorClass::input);
}

std::string count_kind_name(CountKind kind) {
  switch (kind) {
    case CountKind::fq_op: return "fq-op";
    case CountKind::fq_op_vl: return "fq-op-vl";
    case CountKind::fq_orth: return "fq-orth";
    case CountKind::conform_op: return "conform-op";
    case CountKind::conform_op_vl: return "conform-op-vl";
    case CountKind::conform_orth: return "conform-orth";
  }
  return "?";
}

namespace {

void check_count_args(int n, int r) {
  if (n < 1 || n > 12) fail("BadOption", "count needs 1 <= n <= 12", ErrorClass::input);
  if (r < 0 || r > 12) fail("BadOption", "count needs 0 <= r <= 12", ErrorClass::input);
}

std::int64_t to_count(const Rational& x) {
  if (x.get_den() != 1 || !x.get_num().fits_slong_p()) fail("Overflow", "count is not a machine integer");
  return x.get_num().get_si();
}

Rational power(const Rational& b, int e) {
  Rational out(1);
  for (int i = 0; i < e; ++i) out *= b;
  return out;
}

// Admissible letter types. Ordinary: (j, iota), iota in {0,1}^n, kept unless j = min iota.
// Conform: (j, iota'), j = 2..n, iota' over h = 2..n (parities relative to the anchor),
// kept unless j = min iota'.
std::vector<unsigned> admissible_types(int n, bool conform) {
  std::vector<unsigned> types;
  if (!conform) {
    for (int j = 1; j <= n; ++j)
      for (unsigned iota = 0; iota < (1u << n); ++iota)
        if (iota == 0 || j != std::countr_zero(iota) + 1) types.push_back(iota);
  } else {
    for (int j = 2; j <= n; ++j)
      for (unsigned iota = 0; iota < (1u << (n - 1)); ++iota)
        if (iota == 0 || j != std::countr_zero(iota) + 2) types.push_back(iota);
  }
  return types;
}

// Number of r-tuples of admissible letters with each XOR type.
std::vector<std::int64_t> tuples_by_type(int n, int r, bool conform) {
  const std::vector<unsigned> types = admissible_types(n, conform);
  const std::size_t width = std::size_t{1} << (conform ? n - 1 : n);
  std::vector<std::int64_t> by(width, 0);
  by[0] = 1;
  for (int s = 0; s < r; ++s) {
    std::vector<std::int64_t> next(width, 0);
    for (std::size_t x = 0; x < width; ++x)
      if (by[x] != 0)
        for (unsigned t : types) next[x ^ t] += by[x];
    by = std::move(next);
  }
  return by;
}

}  // namespace

std::int64_t coeff_count(int n, int r, CountKind kind) {
  check_count_args(n, r);
  const Rational two_n = power(Rational(2), n);
  const Rational ordinary = Rational(n - 1) * two_n + 1;
  const Rational conform = Rational(n - 2) * power(Rational(2), n - 1) + 1;
  const Rational fraction = Rational(1) - Rational(1) / two_n;
  switch (kind) {
    case CountKind::fq_op: return to_count(power(ordinary, r) * two_n * n);
    case CountKind::fq_op_vl: return to_count(power(ordinary, r) * n);
    case CountKind::fq_orth: return to_count((power(ordinary, r) - 1) * fraction);
    case CountKind::conform_op: return to_count(power(conform, r) * power(Rational(2), n - 1) * n);
    case CountKind::conform_op_vl: return to_count(power(conform, r) * n);
    case CountKind::conform_orth: return to_count(2 * (power(conform, r) - 1) * fraction + 1);
  }
  return 0;
}

std::int64_t coeff_count_enumerated(int n, int r, CountKind kind) {
  check_count_args(n, r);
  if (n > 6) fail("CostGuard", "enumeration is limited to n <= 6", ErrorClass::input);
  const bool conform = kind == CountKind::conform_op || kind == CountKind::conform_op_vl ||
                       kind == CountKind::conform_orth;
  std::vector<std::int64_t> by = tuples_by_type(n, r, conform);
  const std::int64_t all = std::accumulate(by.begin(), by.end(), std::int64_t{0});
  const std::int64_t nonzero = all - by[0];
  switch (kind) {
    case CountKind::fq_op: return all * (std::int64_t{1} << n) * n;
    case CountKind::fq_op_vl: return all * n;
    case CountKind::fq_orth: return nonzero;
    case CountKind::conform_op: return all * (std::int64_t{1} << (n - 1)) * n;
    case CountKind::conform_op_vl: return all * n;
    // exponents on the conjugating side need a nonzero type; the scalar side takes every tuple
    case CountKind::conform_orth: return nonzero + all;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// conform extension

namespace {

bool unit_from(const FormalElement& y, FormalElement& h) {
  if (y.is_zero()) return false;
  FormalElement sq = y * y;
  unsigned kappa = 0;
  Rational c;
  if (!single_blade(sq, kappa, c) || kappa != 0 || sgn(c) >= 0) return false;
  Rational root;
  if (!exact_sqrt(-c, root)) return false;
  h = scale(y, Rational(1) / root);
  return true;
}

// H with H^2 = -1 anticommuting with every element of `ratios` (degree-0 Clifford elements).
FormalElement anticommuting_unit(const Tuple<FormalElement>& ratios, int n, int cap) {
  const unsigned dim = 1u << n;
  FormalElement h;
  std::vector<FormalElement> candidates;
  for (unsigned k = 1; k < dim; ++k) candidates.push_back(FormalElement::blade(n, cap, k));
  for (unsigned k = 1; k < dim; ++k)
    for (unsigned l = k + 1; l < dim; ++l)
      candidates.push_back(FormalElement::blade(n, cap, k) + FormalElement::blade(n, cap, l));
  for (const auto& c : candidates)
    if (unit_from(antisymmetrize_all(c, ratios), h)) return h;
  fail("NoAnticommutingUnit", "no unit anticommuting with the leading ratios was found");
}

}  // namespace

Tuple<FormalElement> conform_extend(const FormalOperation& psi, const Tuple<FormalElement>& a) {
  if (a.empty()) fail("BadShape", "empty tuple", ErrorClass::input);
  const int n = a[0].n(), cap = a[0].cap();
  FormalElement a1inv = inverse(a[0]);
  Tuple<FormalElement> ratios, lead;
  for (std::size_t i = 1; i < a.size(); ++i) {
    ratios.push_back(a[i] * a1inv);
    lead.push_back(ratios.back().degree_part(0));
  }
  if (clifford_residual(lead) > 0) fail("NotFormalDomain", "degree-0 ratios are not a Clifford system");
  FormalElement h = anticommuting_unit(lead, n, cap);
  Tuple<FormalElement> shifted{h};
  for (const auto& x : ratios) shifted.push_back(x * h);
  Tuple<FormalElement> out = psi(shifted);
  for (auto& x : out) x = x * (-h) * a[0];
  return out;
}

MatrixTuple conform_extend_block(const MatrixOperation& psi, const MatrixTuple& a, int anchor) {
  if (anchor < 1 || anchor > static_cast<int>(a.size())) fail("BadIndex", "anchor out of range", ErrorClass::input);
  const int d = a[0].dim();
  const DenseMatrix akinv = mat_inverse(a[static_cast<std::size_t>(anchor - 1)]);
  MatrixTuple doubled;
  for (std::size_t i = 0; i < a.size(); ++i) {
    DenseMatrix y = a[i] * akinv;
    const double lower = static_cast<int>(i) == anchor - 1 ? -1.0 : 1.0;
    DenseMatrix m(2 * d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        m(r, d + c) = y(r, c);
        m(d + r, c) = lower * y(r, c);
      }
    doubled.push_back(std::move(m));
  }
  MatrixTuple res = psi(doubled);
  MatrixTuple out;
  for (const auto& x : res) {
    DenseMatrix top(d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) top(r, c) = x(r, d + c);
    out.push_back(top * a[static_cast<std::size_t>(anchor - 1)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// properties

namespace {

bool same(const Tuple<FormalElement>& x, const Tuple<FormalElement>& y, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    if (!(x[i] - y[i]).is_zero()) return false;
  return true;
}

bool attempt(const std::function<bool()>& f) {
  try {
    return f();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

PropertyReport property_checks(const FormalOperation& psi, int n, int cap) {
  const Tuple<FormalElement> a = generic_input<Rational>(n, cap);
  const Tuple<FormalElement> base = psi(a);
  const std::size_t all = a.size();
  PropertyReport rep;
  rep.fst = attempt([&] {
    for (const Rational& t : {rat(1, 3), rat(2), rat(-1)}) {
      Tuple<FormalElement> mix;
      for (std::size_t i = 0; i < all; ++i) mix.push_back(scale(a[i], t) + scale(base[i], Rational(1) - t));
      if (!same(psi(mix), base, all)) return false;
    }
    return true;
  });
  rep.sigma = attempt([&] {
    for (std::size_t i = 0; i + 1 < all; ++i) {
      Tuple<FormalElement> sa = a, sb = base;
      std::swap(sa[i], sa[i + 1]);
      std::swap(sb[i], sb[i + 1]);
      if (!same(psi(sa), sb, all)) return false;
    }
    return true;
  });
  rep.orth = attempt([&] {
    auto rotate = [&](const Tuple<FormalElement>& x) {
      Tuple<FormalElement> y = x;
      if (all == 1) {
        y[0] = -x[0];
      } else {
        y[0] = scale(x[0], rat(3, 5)) - scale(x[1], rat(4, 5));
        y[1] = scale(x[0], rat(4, 5)) + scale(x[1], rat(3, 5));
      }
      return y;
    };
    return same(psi(rotate(a)), rotate(base), all);
  });
  rep.fil = attempt([&] {
    const FormalElement bump = FormalElement::letter(n, cap, 1, 0) + FormalElement::letter(n, cap, n, (1u << n) - 1);
    for (std::size_t k = 1; k < all; ++k) {
      Tuple<FormalElement> changed = a;
      for (std::size_t j = k; j < all; ++j) changed[j] += bump * a[j];
      if (!same(psi(changed), base, k)) return false;
    }
    return true;
  });
  rep.hom = attempt([&] {
    for (const Rational& s : {rat(1, 2), rat(3)})
      if (!same(psi(tuple_scale(a, s)), base, all)) return false;
    return true;
  });
  return rep;
}

// ---------------------------------------------------------------------------
// deformation

namespace {

TFormalElement to_series(const FormalElement& x, int torder) {
  std::vector<TFormalElement::Term> terms;
  for (const auto& [w, c] : x.terms()) terms.push_back({w, TPoly(c, torder)});
  return TFormalElement::from_terms(x.n(), x.cap(), torder, std::move(terms));
}

Tuple<TFormalElement> to_series(const Tuple<FormalElement>& a, int torder) {
  Tuple<TFormalElement> out;
  for (const auto& x : a) out.push_back(to_series(x, torder));
  return out;
}

}  // namespace

Tuple<TFormalElement> omega_family(const Tuple<FormalElement>& a, int torder) {
  if (torder < 0 || torder > 12) fail("BadOption", "t order must lie in 0..12", ErrorClass::input);
  return o_omega(connection_gs_series(static_cast<int>(a.size()), torder), to_series(a, torder));
}

Tuple<FormalElement> omega_r(const Tuple<FormalElement>& a, int r, int torder) {
  if (r < 0 || r > torder) fail("BadOption", "derivative order exceeds the t order", ErrorClass::input);
  Rational factorial(1);
  for (int i = 2; i <= r; ++i) factorial *= i;
  Tuple<FormalElement> out;
  for (const auto& x : omega_family(a, torder)) {
    std::vector<FormalElement::Term> terms;
    for (const auto& [w, c] : x.terms())
      if (sgn(c[r]) != 0) terms.push_back({w, c[r] * factorial});
    out.push_back(FormalElement::from_terms(x.n(), x.cap(), 0, std::move(terms)));
  }
  return out;
}

std::vector<Tuple<TFormalElement>> omega_recursion(const Tuple<FormalElement>& a, int torder, int passes) {
  const int n = static_cast<int>(a.size());
  const Tuple<TFormalElement> as = to_series(a, torder);
  const SeriesConnection family = connection_gs_series(n, torder);
  const ConnectionData gs = connection_gs(n);
  std::vector<Tuple<TFormalElement>> iterates{gs_chain(as)};
  for (int k = 0; k < passes; ++k) {
    const Tuple<TFormalElement>& q = iterates.back();
    Tuple<TFormalElement> diff = tuple_sub(as, q);
    TFormalElement lambda = connection_apply(family, q, diff) - connection_apply(gs, q, diff);
    iterates.push_back(gs_chain(tuple_add(as, ad(lambda, q))));
  }
  return iterates;
}

int t_valuation(const TFormalElement& x) {
  int v = x.torder() + 1;
  for (const auto& [w, c] : x.terms())
    for (int k = 0; k <= c.order() && k < v; ++k)
      if (sgn(c[k]) != 0) {
        v = k;
        break;
      }
  return v;
}

int t_valuation(const Tuple<TFormalElement>& x) {
  int v = x.empty() ? 0 : x[0].torder() + 1;
  for (const auto& e : x) v = std::min(v, t_valuation(e));
  return v;
}

}  // namespace fqo
