#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fqortho/errors.hpp"
#include "fqortho/formal.hpp"
#include "fqortho/matrix.hpp"

namespace fqo {

// ---------------------------------------------------------------------------
// backend glue

inline double relative_size(const DenseMatrix& x) { return x.frobenius() / std::sqrt(double(x.dim())); }
template <class C>
double relative_size(const BasicFormal<C>& x) {
  return magnitude(x);
}

inline double default_tolerance(const DenseMatrix&) { return 1e-8; }
template <class C>
double default_tolerance(const BasicFormal<C>&) {
  return 0.0;
}

inline DenseMatrix exp_element(const DenseMatrix& x) { return expm(x); }
template <class C>
BasicFormal<C> exp_element(const BasicFormal<C>& x) {
  return exp_formal(x);
}

inline DenseMatrix pol_element(const DenseMatrix& x) { return pol_matrix(x); }
template <class C>
BasicFormal<C> pol_element(const BasicFormal<C>& x) {
  return pol_general(x);
}

// q^{-1} x q, with a sign-only fast path when q is a single signed blade.
inline DenseMatrix conjugate(const DenseMatrix& x, const DenseMatrix& q, const DenseMatrix& qinv) {
  return qinv * x * q;
}
template <class C>
BasicFormal<C> conjugate(const BasicFormal<C>& x, const BasicFormal<C>& q, const BasicFormal<C>& qinv) {
  unsigned kappa = 0;
  C c = q.make(0);
  if (single_blade(q, kappa, c)) {
    C sq = c;
    sq *= c;
    if (sq == q.make(1)) return x.conjugated_by_blade(kappa);
  }
  return qinv * x * q;
}

template <class E>
Tuple<E> tuple_add(const Tuple<E>& a, const Tuple<E>& b) {
  Tuple<E> out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
  return out;
}
template <class E>
Tuple<E> tuple_sub(const Tuple<E>& a, const Tuple<E>& b) {
  Tuple<E> out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
  return out;
}
template <class E, class S>
Tuple<E> tuple_scale(const Tuple<E>& a, const S& s) {
  Tuple<E> out;
  for (const auto& x : a) out.push_back(scale(x, s));
  return out;
}
// t a + (1 - t) b
template <class E>
Tuple<E> tuple_affine(const Tuple<E>& a, const Tuple<E>& b, const Rational& t) {
  return tuple_add(tuple_scale(a, t), tuple_scale(b, Rational(1 - t)));
}
template <class E>
double tuple_residual(const Tuple<E>& a) {
  double m = 0;
  for (const auto& x : a) m = std::max(m, relative_size(x));
  return m;
}

// ---------------------------------------------------------------------------
// systems

template <class E>
double clifford_residual(const Tuple<E>& q) {
  double worst = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i; j < q.size(); ++j) {
      E r = q[i] * q[j] + q[j] * q[i];
      if (i == j) r += scale(one_like(q[i]), Rational(2));
      worst = std::max(worst, relative_size(r));
    }
  return worst;
}

// Q_i Q_k^{-1} Q_j + Q_j Q_k^{-1} Q_i = -2 delta_ij Q_k for i, j != k.
template <class E>
double floating_residual(const Tuple<E>& q, int anchor) {
  const int k = anchor - 1;
  E kinv = inverse(q[k]);
  double base = std::max(1.0, relative_size(q[k]));
  double worst = 0;
  for (int i = 0; i < int(q.size()); ++i)
    for (int j = i; j < int(q.size()); ++j) {
      if (i == k || j == k) continue;
      E r = q[i] * kinv * q[j] + q[j] * kinv * q[i];
      if (i == j) r += scale(q[k], Rational(2));
      worst = std::max(worst, relative_size(r) / base);
    }
  return worst;
}

template <class E>
void require_clifford(const Tuple<E>& q, double tol) {
  double r = clifford_residual(q);
  if (r > tol) fail("NotCliffordSystem", "Clifford relations violated, residual " + std::to_string(r));
}

template <class E>
void require_floating(const Tuple<E>& q, double tol) {
  double r = floating_residual(q, 1);
  if (r > tol) fail("NotFloatingSystem", "floating Clifford relations violated, residual " + std::to_string(r));
}

// ---------------------------------------------------------------------------
// (anti)symmetrization and decompositions

template <class E>
E symmetrize(const E& r, const E& q, int parity) {
  E sq = q * q;
  E one = one_like(q);
  double tol = default_tolerance(q);
  if (relative_size(sq - one) > tol && relative_size(sq + one) > tol)
    fail("NotInvolution", "symmetrization needs q^2 = +-1");
  E qinv = relative_size(sq - one) <= tol ? q : -q;
  E c = conjugate(r, q, qinv);
  return scale(parity == 0 ? r + c : r - c, rat(1, 2));
}

// All 2^m components of x with respect to the commuting involutions q[0..m-1];
// component index bit h is the parity with respect to q[h].
template <class E>
std::vector<E> full_split(const E& x, const Tuple<E>& q, const Tuple<E>& qinv) {
  std::vector<E> comps{x};
  for (std::size_t h = 0; h < q.size(); ++h) {
    std::vector<E> next(comps.size() * 2, zero_like(x));
    for (std::size_t m = 0; m < comps.size(); ++m) {
      E c = conjugate(comps[m], q[h], qinv[h]);
      next[m] = scale(comps[m] + c, rat(1, 2));
      next[m | (std::size_t{1} << h)] = scale(comps[m] - c, rat(1, 2));
    }
    comps = std::move(next);
  }
  return comps;
}

template <class E>
Tuple<E> inverses(const Tuple<E>& q) {
  Tuple<E> out;
  for (const auto& x : q) out.push_back(inverse(x));
  return out;
}

// (R/Q)_j^iota (right) and (Q\R)_j^iota (left), indexed [j-1][iota mask].
template <class E>
struct Decomposition {
  std::vector<std::vector<E>> right;
  std::vector<std::vector<E>> left;
};

template <class E>
Decomposition<E> decompose(const Tuple<E>& r, const Tuple<E>& q, bool with_left = true) {
  Tuple<E> qinv = inverses(q);
  Decomposition<E> d;
  for (std::size_t j = 0; j < q.size(); ++j) {
    d.right.push_back(full_split(r[j] * qinv[j], q, qinv));
    if (with_left) d.left.push_back(full_split(qinv[j] * r[j], q, qinv));
  }
  return d;
}

enum class Side { right, left };

template <class E>
E decomp(const Tuple<E>& r, const Tuple<E>& q, int j, unsigned iota, Side side = Side::right) {
  Tuple<E> qinv = inverses(q);
  E x = side == Side::right ? r[j - 1] * qinv[j - 1] : qinv[j - 1] * r[j - 1];
  return full_split(x, q, qinv)[iota];
}

// Floating decomposition with anchor k: symmetrize against Q_s Q_k^{-1} (right)
// or Q_k^{-1} Q_s (left) with parity iota_s - iota_k, s != k.
template <class E>
struct FloatingDecomposition {
  std::vector<std::vector<E>> right;  // [j-1][iota mask], iota taken mod all-ones
  std::vector<std::vector<E>> left;
};

template <class E>
FloatingDecomposition<E> decompose_floating(const Tuple<E>& r, const Tuple<E>& q, int anchor = 1) {
  const int n = static_cast<int>(q.size());
  const int k = anchor - 1;
  Tuple<E> qinv = inverses(q);
  Tuple<E> rq, rqinv, lq, lqinv;
  std::vector<int> others;
  for (int s = 0; s < n; ++s) {
    if (s == k) continue;
    others.push_back(s);
    rq.push_back(q[s] * qinv[k]);
    lq.push_back(qinv[k] * q[s]);
  }
  rqinv = inverses(rq);
  lqinv = inverses(lq);
  auto reindex = [&](const std::vector<E>& comps) {
    std::vector<E> out;
    for (unsigned iota = 0; iota < (1u << n); ++iota) {
      unsigned ik = (iota >> k) & 1u;
      unsigned m = 0;
      for (std::size_t h = 0; h < others.size(); ++h)
        if ((((iota >> others[h]) & 1u) ^ ik) != 0) m |= 1u << h;
      out.push_back(comps[m]);
    }
    return out;
  };
  FloatingDecomposition<E> d;
  for (int j = 0; j < n; ++j) {
    d.right.push_back(reindex(full_split(r[j] * qinv[j], rq, rqinv)));
    d.left.push_back(reindex(full_split(qinv[j] * r[j], lq, lqinv)));
  }
  return d;
}

template <class E>
E decomp_floating(const Tuple<E>& r, const Tuple<E>& q, int j, unsigned iota, Side side = Side::right,
                  int anchor = 1) {
  auto d = decompose_floating(r, q, anchor);
  return side == Side::right ? d.right[j - 1][iota] : d.left[j - 1][iota];
}

// ---------------------------------------------------------------------------
// tangent data and actions

template <class E>
struct FPair {
  E left;
  E right;  // element of the opposite algebra
};

template <class E>
FPair<E> fpair_sub(const FPair<E>& a, const FPair<E>& b) {
  return {a.left - b.left, a.right - b.right};
}
template <class E>
double fpair_residual(const FPair<E>& a) {
  return std::max(relative_size(a.left), relative_size(a.right));
}

template <class E>
double tangent_residual(const Tuple<E>& q, const Tuple<E>& r) {
  double worst = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i; j < q.size(); ++j)
      worst = std::max(worst, relative_size(r[i] * q[j] + r[j] * q[i] + q[i] * r[j] + q[j] * r[i]));
  return worst;
}

template <class E>
bool is_tangent(const Tuple<E>& q, const Tuple<E>& r, double tol) {
  return tangent_residual(q, r) <= tol;
}

template <class E>
Tuple<E> ad(const E& x, const Tuple<E>& a) {
  Tuple<E> out;
  for (const auto& y : a) out.push_back(x * y - y * x);
  return out;
}

template <class E>
Tuple<E> Ad(const E& x, const Tuple<E>& a) {
  E xinv = inverse(x);
  Tuple<E> out;
  for (const auto& y : a) out.push_back(x * y * xinv);
  return out;
}

template <class E>
Tuple<E> ad_f(const FPair<E>& p, const Tuple<E>& a) {
  Tuple<E> out;
  for (const auto& y : a) out.push_back(p.left * y + y * p.right);
  return out;
}

template <class E>
Tuple<E> Ad_f(const FPair<E>& p, const Tuple<E>& a) {
  Tuple<E> out;
  for (const auto& y : a) out.push_back(p.left * y * p.right);
  return out;
}

template <class E>
FPair<E> small_delta(const E& x) {
  return {x, inverse(x)};
}
template <class E>
FPair<E> exp_f(const FPair<E>& p) {
  return {exp_element(p.left), exp_element(p.right)};
}
template <class E>
FPair<E> big_delta(const E& x) {
  return {x, -x};
}
template <class E>
E nabla(const FPair<E>& p) {
  return scale(p.left - p.right, rat(1, 2));
}
// Tuple version of nabla: ((X_i)^1_{Q_i})_i.
template <class E>
Tuple<E> nabla_tuple(const Tuple<E>& q, const Tuple<E>& x) {
  Tuple<E> out;
  for (std::size_t i = 0; i < q.size(); ++i) out.push_back(symmetrize(x[i], q[i], 1));
  return out;
}

// X with X^{0...0} = 0, the normalization of ordinary tangent generators.
template <class E>
E tangent_normalize(const E& x, const Tuple<E>& q) {
  Tuple<E> qinv = inverses(q);
  return x - full_split(x, q, qinv)[0];
}

// ---------------------------------------------------------------------------
// connection data

template <class S>
class BasicConnection {
 public:
  BasicConnection() = default;
  BasicConnection(int n, std::string name, S zero)
      : n_(n), name_(std::move(name)), w_(static_cast<std::size_t>(n) << n, zero) {}

  int n() const { return n_; }
  const std::string& name() const { return name_; }
  const S& at(int j, unsigned iota) const { return w_[index(j, iota)]; }
  void set(int j, unsigned iota, S value) { w_[index(j, iota)] = std::move(value); }

  // zero where iota_j = 0, unit sum over j for each nonzero iota; `one` supplies the unit of S.
  bool valid(const S& one, std::string* why = nullptr) const {
    for (unsigned iota = 0; iota < (1u << n_); ++iota) {
      S sum = w_[0] - w_[0];
      for (int j = 1; j <= n_; ++j) {
        if (!(iota & (1u << (j - 1))) && !is_zero_value(at(j, iota))) {
          if (why) *why = "coefficient must vanish at j=" + std::to_string(j) + " iota=" + mask_bits(n_, iota);
          return false;
        }
        sum += at(j, iota);
      }
      if (iota != 0 && !(sum == one)) {
        if (why) *why = "coefficients do not sum to 1 at iota=" + mask_bits(n_, iota);
        return false;
      }
    }
    return true;
  }

  template <class T, class F>
  BasicConnection<T> convert(F&& f) const {
    BasicConnection<T> out(n_, name_, f(w_[0]));
    for (int j = 1; j <= n_; ++j)
      for (unsigned iota = 0; iota < (1u << n_); ++iota) out.set(j, iota, f(at(j, iota)));
    return out;
  }

 private:
  static bool is_zero_value(const double& v) { return v == 0.0; }
  static bool is_zero_value(const Rational& v) { return fqo::is_zero(v); }
  static bool is_zero_value(const TPoly& v) { return v.is_zero(); }
  std::size_t index(int j, unsigned iota) const {
    if (j < 1 || j > n_ || iota >= (1u << n_)) fail("BadShape", "connection index out of range");
    return (static_cast<std::size_t>(j - 1) << n_) + iota;
  }
  int n_ = 0;
  std::string name_;
  std::vector<S> w_;
};

using ConnectionData = BasicConnection<Rational>;
using RealConnection = BasicConnection<double>;
using SeriesConnection = BasicConnection<TPoly>;

ConnectionData connection_gs(int n);
ConnectionData connection_sy(int n);
ConnectionData connection_weighted(const std::vector<Rational>& w);
RealConnection connection_weighted_real(const std::vector<double>& w);
// Weights (1, t, ..., t^{n-1}) with t a formal series variable.
SeriesConnection connection_gs_series(int n, int torder);
// Weights (1, t, ..., t^{n-1}) at a rational t > 0.
ConnectionData connection_gs_at(int n, const Rational& t);
RealConnection to_real(const ConnectionData& c);

// ---------------------------------------------------------------------------
// connections

// Pi^omega_Q R = 1/2 sum omega_j^iota (R/Q)_j^iota
template <class E, class S>
E connection_apply(const BasicConnection<S>& w, const Tuple<E>& q, const Tuple<E>& r) {
  Tuple<E> qinv = inverses(q);
  E acc = zero_like(q[0]);
  const int n = static_cast<int>(q.size());
  for (int j = 1; j <= n; ++j) {
    std::vector<E> comps = full_split(r[j - 1] * qinv[j - 1], q, qinv);
    for (unsigned iota = 1; iota < (1u << n); ++iota) acc += scale(comps[iota], w.at(j, iota));
  }
  return scale(acc, rat(1, 2));
}

// Pi^{f omega}_Q R = (1/2 (R/Q)^{f omega}, 1/2 (Q\R)^{f omega})
template <class E, class S>
FPair<E> connection_apply_floating(const BasicConnection<S>& w, const Tuple<E>& q, const Tuple<E>& r,
                                   int anchor = 1) {
  auto d = decompose_floating(r, q, anchor);
  const int n = static_cast<int>(q.size());
  E left = zero_like(q[0]);
  E right = zero_like(q[0]);
  for (int j = 1; j <= n; ++j)
    for (unsigned iota = 1; iota < (1u << n); ++iota) {
      left += scale(d.right[j - 1][iota], w.at(j, iota));
      right += scale(d.left[j - 1][iota], w.at(j, iota));
    }
  return {scale(left, rat(1, 2)), scale(right, rat(1, 2))};
}

// The tangent representative of the unit pair: Pi^f_Q Q.
template <class E>
FPair<E> half_unit_pair(const E& like) {
  E h = scale(one_like(like), rat(1, 2));
  return {h, h};
}

// ---------------------------------------------------------------------------
// eta connections by orthogonal reduction

struct EtaReduction {
  std::vector<std::vector<double>> rotation;  // rows: orthonormal eigenvectors
  std::vector<double> weights;
};
struct ExactEtaReduction {
  std::vector<std::vector<Rational>> rotation;
  std::vector<Rational> weights;
};

EtaReduction reduce_eta(const std::vector<std::vector<double>>& eta);
// Exact reduction for diagonal eta or n = 2 with rational unit eigenvectors.
ExactEtaReduction reduce_eta_exact(const std::vector<std::vector<Rational>>& eta);

template <class E, class S>
Tuple<E> rotate_tuple(const std::vector<std::vector<S>>& u, const Tuple<E>& a) {
  Tuple<E> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    E acc = zero_like(a[0]);
    for (std::size_t j = 0; j < a.size(); ++j) acc += scale(a[j], u[i][j]);
    out.push_back(acc);
  }
  return out;
}

inline DenseMatrix connection_eta_matrix(const std::vector<std::vector<double>>& eta, const MatrixTuple& q,
                                         const MatrixTuple& r) {
  EtaReduction red = reduce_eta(eta);
  return connection_apply(connection_weighted_real(red.weights), rotate_tuple(red.rotation, q),
                          rotate_tuple(red.rotation, r));
}
inline FPair<DenseMatrix> connection_eta_matrix_floating(const std::vector<std::vector<double>>& eta,
                                                         const MatrixTuple& q, const MatrixTuple& r) {
  EtaReduction red = reduce_eta(eta);
  return connection_apply_floating(connection_weighted_real(red.weights), rotate_tuple(red.rotation, q),
                                   rotate_tuple(red.rotation, r));
}

template <class C>
BasicFormal<C> connection_eta_formal(const std::vector<std::vector<Rational>>& eta, const Tuple<BasicFormal<C>>& q,
                                     const Tuple<BasicFormal<C>>& r) {
  ExactEtaReduction red = reduce_eta_exact(eta);
  return connection_apply(connection_weighted(red.weights), rotate_tuple(red.rotation, q),
                          rotate_tuple(red.rotation, r));
}
template <class C>
FPair<BasicFormal<C>> connection_eta_formal_floating(const std::vector<std::vector<Rational>>& eta,
                                                     const Tuple<BasicFormal<C>>& q,
                                                     const Tuple<BasicFormal<C>>& r) {
  ExactEtaReduction red = reduce_eta_exact(eta);
  return connection_apply_floating(connection_weighted(red.weights), rotate_tuple(red.rotation, q),
                                   rotate_tuple(red.rotation, r));
}

// ---------------------------------------------------------------------------
// fixed-point predicates

enum class PredicateKind { gs, fgs, sy, fsy, weighted, fweighted, eta, feta };

struct PredicateReport {
  bool predicate = false;
  double predicate_residual = 0;
  bool connection_vanishes = false;  // Pi A = 0, or Pi^f A = unit pair
  double connection_residual = 0;
};

template <class E>
E tuple_sum(const Tuple<E>& a) {
  E acc = zero_like(a[0]);
  for (const auto& x : a) acc += x;
  return acc;
}

// Antisymmetrize successively against each element of `against`.
template <class E>
E antisymmetrize_all(E x, const Tuple<E>& against) {
  for (const auto& q : against) x = symmetrize(x, q, 1);
  return x;
}

inline ExactEtaReduction eta_rotation_for(const DenseMatrix&, const std::vector<std::vector<Rational>>& eta) {
  std::vector<std::vector<double>> e;
  for (const auto& row : eta) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(to_double(v));
    e.push_back(r);
  }
  EtaReduction red = reduce_eta(e);
  ExactEtaReduction out;
  for (const auto& row : red.rotation) {
    std::vector<Rational> r;
    for (double v : row) r.push_back(Rational(v));
    out.rotation.push_back(r);
  }
  for (double v : red.weights) out.weights.push_back(Rational(v));
  return out;
}
template <class C>
ExactEtaReduction eta_rotation_for(const BasicFormal<C>&, const std::vector<std::vector<Rational>>& eta) {
  return reduce_eta_exact(eta);
}

template <class E>
PredicateReport characterizing_predicate(PredicateKind kind, const Tuple<E>& q, const Tuple<E>& a,
                                const std::vector<Rational>& weights = {},
                                const std::vector<std::vector<Rational>>& eta = {}, double tol = -1) {
  if (tol < 0) tol = default_tolerance(q[0]);
  const int n = static_cast<int>(q.size());
  PredicateReport rep;
  std::vector<Rational> w = weights;
  if (kind == PredicateKind::sy || kind == PredicateKind::fsy || w.empty()) w.assign(n, Rational(1));
  switch (kind) {
    case PredicateKind::gs: {
      for (int k = 1; k <= n; ++k) {
        Tuple<E> first(q.begin(), q.begin() + k);
        rep.predicate_residual =
            std::max(rep.predicate_residual, relative_size(antisymmetrize_all(a[k - 1], first)));
      }
      rep.connection_residual = relative_size(connection_apply(connection_gs(n), q, a));
      break;
    }
    case PredicateKind::sy:
    case PredicateKind::weighted: {
      E acc = zero_like(q[0]);
      for (int i = 0; i < n; ++i) acc += scale(a[i] * q[i] - q[i] * a[i], w[i]);
      rep.predicate_residual = relative_size(acc);
      rep.connection_residual = relative_size(connection_apply(connection_weighted(w), q, a));
      break;
    }
    case PredicateKind::fgs: {
      E q1inv = inverse(q[0]);
      double r = relative_size(a[0] - q[0]);
      for (int k = 2; k <= n; ++k) {
        Tuple<E> ratios;
        for (int h = 2; h <= k; ++h) ratios.push_back(q[h - 1] * q1inv);
        r = std::max(r, relative_size(antisymmetrize_all(a[k - 1] * q1inv, ratios)));
      }
      rep.predicate_residual = r;
      rep.connection_residual =
          fpair_residual(fpair_sub(connection_apply_floating(connection_gs(n), q, a), half_unit_pair(q[0])));
      break;
    }
    case PredicateKind::fsy:
    case PredicateKind::fweighted: {
      E right = zero_like(q[0]), left = zero_like(q[0]);
      Rational total(0);
      for (int i = 0; i < n; ++i) {
        E qinv = inverse(q[i]);
        right += scale(a[i] * qinv, w[i]);
        left += scale(qinv * a[i], w[i]);
        total += w[i];
      }
      E target = scale(one_like(q[0]), total);
      rep.predicate_residual = std::max(relative_size(right - target), relative_size(left - target));
      rep.connection_residual = fpair_residual(
          fpair_sub(connection_apply_floating(connection_weighted(w), q, a), half_unit_pair(q[0])));
      break;
    }
    case PredicateKind::eta:
    case PredicateKind::feta: {
      ExactEtaReduction red = eta_rotation_for(q[0], eta);
      return characterizing_predicate(kind == PredicateKind::eta ? PredicateKind::weighted : PredicateKind::fweighted,
                             rotate_tuple(red.rotation, q), rotate_tuple(red.rotation, a), red.weights, {}, tol);
    }
  }
  rep.predicate = rep.predicate_residual <= tol;
  rep.connection_vanishes = rep.connection_residual <= tol;
  return rep;
}

}  // namespace fqo
