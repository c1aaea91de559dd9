#pragma once

#include <functional>
#include <limits>
#include <string>

#include "fqortho/geometry.hpp"

namespace fqo {

// ---------------------------------------------------------------------------
// spectra of leading parts

// Left-multiplication matrix of the Clifford (letter-degree 0) part of x on the 2^n blades.
template <class C>
DenseMatrix leading_matrix(const BasicFormal<C>& x) {
  const unsigned dim = 1u << x.n();
  DenseMatrix m(static_cast<int>(dim));
  for (const auto& [w, c] : x.terms()) {
    if (w.degree() != 0) continue;
    double v = to_double(constant_term(c));
    for (unsigned col = 0; col < dim; ++col)
      m(static_cast<int>(w.qmask() ^ col), static_cast<int>(col)) += blade_product_sign(w.qmask(), col) * v;
  }
  return m;
}

inline double min_real_part(const DenseMatrix& x) { return spectrum(x).min_real_part; }
template <class C>
double min_real_part(const BasicFormal<C>& x) {
  return spectrum(leading_matrix(x)).min_real_part;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt orthogonalization

template <class E>
struct GSResult {
  Tuple<E> system;
  double cp_residual = 0;
  double lgs_residual = 0;
  double nsp_margin = 0;  // smallest real part over Sp A_k Q_k^{-1}
  bool floating = false;
};

struct CharacterizationReport {
  double cp_residual = 0;
  double lgs_residual = 0;
  double nsp_margin = 0;
  bool cp = false;
  bool lgs = false;
  bool nsp = false;
  bool all() const { return cp && lgs && nsp; }
};

template <class E>
E polarize_stage(const E& b, int stage) {
  try {
    return pol_element(b);
  } catch (const Error& e) {
    if (e.error_class() == ErrorClass::convergence) throw;
    fail("PolarizationDomain", "stage " + std::to_string(stage) + ": " + e.what());
  }
}

// Q_k = pol of A_k antisymmetrized against Q_1 .. Q_{k-1}; stages are numbered from offset + 1.
template <class E>
Tuple<E> gs_chain(const Tuple<E>& a, int offset = 0) {
  Tuple<E> q;
  for (std::size_t k = 0; k < a.size(); ++k)
    q.push_back(polarize_stage(antisymmetrize_all(a[k], q), static_cast<int>(k) + 1 + offset));
  return q;
}

template <class E>
Tuple<E> floating_gs_chain(const Tuple<E>& a) {
  E a1inv = inverse(a[0]);
  Tuple<E> ratios;
  for (std::size_t k = 1; k < a.size(); ++k) ratios.push_back(a[k] * a1inv);
  Tuple<E> out{a[0]};
  for (const auto& x : gs_chain(ratios, 1)) out.push_back(x * a[0]);
  return out;
}

template <class E>
CharacterizationReport check_gs_characterization(const Tuple<E>& a, const Tuple<E>& q, bool floating,
                                                 double tol = -1) {
  if (tol < 0) tol = default_tolerance(q[0]);
  CharacterizationReport rep;
  rep.cp_residual = floating ? floating_residual(q, 1) : clifford_residual(q);
  // the gauge predicate needs a Clifford system; without one it is reported as failing
  rep.lgs_residual = std::numeric_limits<double>::infinity();
  if (rep.cp_residual <= tol) {
    PredicateReport pr = characterizing_predicate(floating ? PredicateKind::fgs : PredicateKind::gs, q, a, {}, {}, tol);
    rep.lgs_residual = std::max(pr.predicate_residual, pr.connection_residual);
  }
  rep.nsp_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < q.size(); ++k)
    rep.nsp_margin = std::min(rep.nsp_margin, min_real_part(a[k] * inverse(q[k])));
  rep.cp = rep.cp_residual <= tol;
  rep.lgs = rep.lgs_residual <= tol;
  rep.nsp = rep.nsp_margin > 0;
  return rep;
}

template <class E>
GSResult<E> finish_result(const Tuple<E>& a, Tuple<E> q, bool floating) {
  CharacterizationReport rep = check_gs_characterization(a, q, floating);
  GSResult<E> out;
  out.system = std::move(q);
  out.cp_residual = rep.cp_residual;
  out.lgs_residual = rep.lgs_residual;
  out.nsp_margin = rep.nsp_margin;
  out.floating = floating;
  return out;
}

template <class E>
GSResult<E> ogs(const Tuple<E>& a) {
  if (a.empty()) fail("BadShape", "empty tuple", ErrorClass::input);
  return finish_result(a, gs_chain(a), false);
}

template <class E>
GSResult<E> ofgs(const Tuple<E>& a) {
  if (a.empty()) fail("BadShape", "empty tuple", ErrorClass::input);
  return finish_result(a, floating_gs_chain(a), true);
}

// ---------------------------------------------------------------------------
// derivative (matrix backend)

// Variation of pol H in direction e, by trapezoidal quadrature over one period of
// K (e cos^2 + H e H sin^2) K, K = (cos^2 - H^2 sin^2)^{-1}; nodes = 0 doubles until settled.
DenseMatrix dpol(const DenseMatrix& h, const DenseMatrix& e, int nodes = 0);
// Forward-mode derivative of the recursive Gram-Schmidt chain.
MatrixTuple dogs(const MatrixTuple& a, const MatrixTuple& eps);

// ---------------------------------------------------------------------------
// minimal lift and transport

// Derivative of the floating relations Q_i K Q_j + Q_j K Q_i + 2 delta_ij Q_k (K = Q_k^{-1}) along r.
template <class E>
double floating_tangent_residual(const Tuple<E>& q, const Tuple<E>& r, int anchor = 1) {
  const int k = anchor - 1;
  E kinv = inverse(q[k]);
  E dk = -(kinv * r[k] * kinv);
  double worst = 0;
  for (int i = 0; i < int(q.size()); ++i)
    for (int j = i; j < int(q.size()); ++j) {
      if (i == k || j == k) continue;
      E v = r[i] * kinv * q[j] + q[i] * dk * q[j] + q[i] * kinv * r[j] + r[j] * kinv * q[i] + q[j] * dk * q[i] +
            q[j] * kinv * r[i];
      if (i == j) v += scale(r[k], Rational(2));
      worst = std::max(worst, relative_size(v));
    }
  return worst;
}

// X with (ad X) q = r and X^{0...0} = 0; every connection gives it, GS is the cheapest.
template <class E>
E minimal_lift(const Tuple<E>& q, const Tuple<E>& r, double tol = -1) {
  if (tol < 0) tol = default_tolerance(q[0]);
  double res = tangent_residual(q, r);
  if (res > tol * std::max(1.0, tuple_residual(r)))
    fail("NotTangent", "tangent residual " + std::to_string(res));
  return connection_apply(connection_gs(static_cast<int>(q.size())), q, r);
}

template <class E>
FPair<E> minimal_lift_floating(const Tuple<E>& q, const Tuple<E>& r, double tol = -1) {
  if (tol < 0) tol = default_tolerance(q[0]);
  double res = floating_tangent_residual(q, r);
  if (res > tol * std::max(1.0, tuple_residual(r)))
    fail("NotTangent", "floating tangent residual " + std::to_string(res));
  return connection_apply_floating(connection_gs(static_cast<int>(q.size())), q, r);
}

using MatrixPath = std::function<MatrixTuple(double)>;

struct TransportOptions {
  int steps = 100;
  double begin = 0.0;
  double end = 1.0;
  double fd_step = 1e-3;  // five-point central difference for the path velocity
  double system_tol = 1e-8;
  double tangent_tol = 1e-6;
};

// H with H(begin) = 1 and H' H^{-1} = minimal_lift(F, F'), so (Ad H(end)) F(begin) = F(end).
// The path is sampled up to 2 fd_step outside [begin, end].
DenseMatrix parallel_transport(const MatrixPath& path, const TransportOptions& opt = {});
// Floating version: pair (L, R) with L F(begin) R = F(end).
FPair<DenseMatrix> parallel_transport_floating(const MatrixPath& path, const TransportOptions& opt = {});

// Transport along t -> ogs((1 - t) q + t r); (Ad H) q = r.
DenseMatrix pt_gs(const MatrixTuple& r, const MatrixTuple& q, int steps = 100);
// Transport along t -> ofgs((1 - t) q + t r); L q R = r.
FPair<DenseMatrix> pt_fgs(const MatrixTuple& r, const MatrixTuple& q, int steps = 100);

}  // namespace fqo
