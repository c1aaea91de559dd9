#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fqortho/gram_schmidt.hpp"
#include "fqortho/tables.hpp"

namespace fqo {

// ---------------------------------------------------------------------------
// the Step map and its iteration

// Q <- Ad(exp Pi^w_Q (A - Q)) Q
template <class E, class S>
Tuple<E> omega_step(const BasicConnection<S>& w, const Tuple<E>& a, const Tuple<E>& q) {
  E x = connection_apply(w, q, tuple_sub(a, q));
  return Ad(exp_element(x), q);
}

// Q <- Ad^f(exp^f (Pi^{fw}_Q A - (1/2, 1/2))) Q
template <class E, class S>
Tuple<E> omega_step_floating(const BasicConnection<S>& w, const Tuple<E>& a, const Tuple<E>& q) {
  FPair<E> p = fpair_sub(connection_apply_floating(w, q, a), half_unit_pair(q[0]));
  return Ad_f(exp_f(p), q);
}

struct OmegaRun {
  int iterations = 0;
};

// Formal fixed point of the Step map. The iteration is pulled back to a fixed base c
// (the polarized degree-0 parts): with Q = H c H^{-1} the step is H <- H exp(Y), B <- exp(-Y) B exp(Y),
// Y = Pi_c(B - c), so decompositions stay against the base. Each pass gains one letter degree.
template <class C, class S>
Tuple<BasicFormal<C>> o_omega(const BasicConnection<S>& w, const Tuple<BasicFormal<C>>& a, bool floating = false,
                              OmegaRun* run = nullptr) {
  using F = BasicFormal<C>;
  if (a.empty()) fail("BadShape", "empty tuple", ErrorClass::input);
  if (w.n() != static_cast<int>(a.size())) fail("BadShape", "connection and tuple sizes differ", ErrorClass::input);
  Tuple<F> lead;
  for (const auto& x : a) lead.push_back(x.degree_part(0));
  Tuple<F> c = floating ? floating_gs_chain(lead) : gs_chain(lead);
  if (floating ? floating_residual(c, 1) > 0 : clifford_residual(c) > 0)
    fail("NotFormalDomain", "degree-0 parts do not polarize to a system");
  Tuple<F> b = a;
  if (!floating) {
    // the fixed point is invariant under A_j -> s_j A_j but the Step iteration only gains
    // degrees when the degree-0 parts equal the base, so divide the scalars out first
    for (std::size_t j = 0; j < b.size(); ++j) {
      F ratio = -(c[j] * lead[j]);
      unsigned kappa = 0;
      C s = ratio.make(0);
      if (!single_blade(ratio, kappa, s) || kappa != 0 || sgn(constant_term(s)) <= 0)
        fail("NotFormalDomain", "degree-0 part of A_" + std::to_string(j + 1) + " is not a positive multiple of Q_" +
                                    std::to_string(j + 1));
      b[j] = b[j].scaled(invert(s));
    }
  }
  const int limit = a[0].cap() + 2;
  F left = a[0].unit(), left_inv = left, right = left;
  int it = 0;
  for (;; ++it) {
    if (it > limit) fail("NoConvergence", "formal step iteration did not terminate", ErrorClass::convergence);
    if (!floating) {
      F y = connection_apply(w, c, tuple_sub(b, c));
      if (y.is_zero()) break;
      F e = exp_formal(y), einv = exp_formal(-y);
      left = left * e;
      left_inv = einv * left_inv;
      for (auto& x : b) x = einv * x * e;
    } else {
      FPair<F> p = fpair_sub(connection_apply_floating(w, c, b), half_unit_pair(c[0]));
      if (p.left.is_zero() && p.right.is_zero()) break;
      F el = exp_formal(p.left), elinv = exp_formal(-p.left);
      F er = exp_formal(p.right), erinv = exp_formal(-p.right);
      left = left * el;
      right = er * right;
      for (auto& x : b) x = elinv * x * erinv;
    }
  }
  if (run) run->iterations = it;
  Tuple<F> out;
  for (const auto& x : c) out.push_back(floating ? left * x * right : left * x * left_inv);
  return out;
}

// Generic coefficient tables of O^w up to letter degree max_r; n <= 3 and max_r <= 3.
void table_cost_guard(int n, int max_r);

template <class C, class S>
CoeffTable<C> extract_omega_tables(const BasicConnection<S>& w, int n, int max_r, bool floating = false,
                                   int torder = 0) {
  table_cost_guard(n, max_r);
  auto a = generic_input<C>(n, max_r, torder);
  return extract_coeff_table(o_omega(w, a, floating), max_r);
}

// ---------------------------------------------------------------------------
// free coefficient data

// Letter (j, iota) survives in the GS gauge unless j = min{h : iota_h = 1}.
inline bool gs_admissible_letter(int n, int letter) {
  unsigned iota = letter_iota(n, letter);
  return iota == 0 || letter_generator(n, letter) != std::countr_zero(iota) + 1;
}

// Coefficients p^{[k]}_{kappa, letters} of a formal FQ operation, admissible letters only.
struct OperationData {
  int n = 0;
  std::map<std::tuple<int, std::vector<int>, unsigned>, Rational> coeffs;

  // All higher coefficients zero, degree-0 coefficient 1: the data of O^GS.
  static OperationData unit(int n);
  // Admissible part of a table of any operation (inadmissible entries are dropped).
  static OperationData from_table(const RationalTable& t);
  void set(int k, const std::vector<int>& letters, unsigned kappa, const Rational& v);
  int max_degree() const;
};

// Coefficients of the exponents E^{(r)} of an orthogonalization, letter sequences of length r.
struct OrthogonalizationData {
  int n = 0;
  std::map<std::vector<int>, Rational> coeffs;
  void set(const std::vector<int>& letters, const Rational& v);
  int max_degree() const;
};

// Psi(A)_k = (sum p (R/Q)..(R/Q) Q^kappa) Q_k in the GS gauge Q = O^GS(A), R = A - Q.
Tuple<FormalElement> custom_fq_eval(const OperationData& p, const Tuple<FormalElement>& a);
// Ad(exp E^{(1)}) Ad(exp E^{(2)}) ... Q with E^{(r)} = sum p (R/Q)..(R/Q).
Tuple<FormalElement> custom_orth_eval(const OrthogonalizationData& p, const Tuple<FormalElement>& a);

// ---------------------------------------------------------------------------
// coefficient counts

enum class CountKind { fq_op, fq_op_vl, fq_orth, conform_op, conform_op_vl, conform_orth };

CountKind parse_count_kind(const std::string& name);
std::string count_kind_name(CountKind kind);
// Closed forms.
std::int64_t coeff_count(int n, int r, CountKind kind);
// Direct enumeration of admissible index data.
std::int64_t coeff_count_enumerated(int n, int r, CountKind kind);

// ---------------------------------------------------------------------------
// conform extension

using FormalOperation = std::function<Tuple<FormalElement>(const Tuple<FormalElement>&)>;
using MatrixOperation = std::function<MatrixTuple(const MatrixTuple&)>;

// Ratio reduction: with H a unit anticommuting with the degree-0 ratios A_i A_1^{-1} (i > 1),
// Psi^e(A)_i = psi(A A_1^{-1} H)_i H^{-1} A_1.
Tuple<FormalElement> conform_extend(const FormalOperation& psi, const Tuple<FormalElement>& a);
// Doubled-dimension construction: psi applied to [[0, A_i A_k^{-1}], [(-1)^{i=k} A_i A_k^{-1}, 0]],
// read off from the upper-right block times A_k.
MatrixTuple conform_extend_block(const MatrixOperation& psi, const MatrixTuple& a, int anchor = 1);

// ---------------------------------------------------------------------------
// structural properties

struct PropertyReport {
  bool fst = false;    // Psi(t A + (1 - t) Psi(A)) = Psi(A)
  bool sigma = false;  // permutation equivariance
  bool orth = false;   // equivariance under a rational rotation of the inputs
  bool fil = false;    // Psi(A)_{1..k} depends on A_{1..k} only
  bool hom = false;    // Psi(s A) = Psi(A)
};

// Exact checks on the generic input of size n truncated at `cap`.
PropertyReport property_checks(const FormalOperation& psi, int n, int cap);

// ---------------------------------------------------------------------------
// GS(t) deformation

// Omega(A, t) = O^{GS(t)}(A) as a series in t; coefficient r of the result is Omega_r / r!.
Tuple<TFormalElement> omega_family(const Tuple<FormalElement>& a, int torder);
// Omega_r(A): r-th t-derivative at t = 0.
Tuple<FormalElement> omega_r(const Tuple<FormalElement>& a, int r, int torder);

// Iterates Q^{[k+1]} = O^GS(A + (ad' Q^{[k]}) (t Lambda_{Q^{[k]}} A)), t Lambda = Pi^{GS(t)} - Pi^{GS};
// each pass fixes one more power of t.
std::vector<Tuple<TFormalElement>> omega_recursion(const Tuple<FormalElement>& a, int torder, int passes);

// Lowest power of t present in x (torder + 1 when x vanishes).
int t_valuation(const TFormalElement& x);
int t_valuation(const Tuple<TFormalElement>& x);

}  // namespace fqo
