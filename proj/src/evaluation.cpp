#include "fqortho/evaluation.hpp"

#include <cmath>

namespace fqo {

MatrixAssignment assignment_from_decomposition(const MatrixTuple& a, const MatrixTuple& q) {
  if (a.size() != q.size()) fail("MismatchedShape", "input and base differ in length", ErrorClass::input);
  const int n = static_cast<int>(q.size());
  if (n > kMaxFormalN) fail("BadShape", "at most 4 generators", ErrorClass::input);
  MatrixAssignment as;
  as.generators = q;
  auto d = decompose(tuple_sub(a, q), q, false);
  as.letters.resize(static_cast<std::size_t>(letter_count(n)));
  for (int l = 0; l < letter_count(n); ++l)
    as.letters[static_cast<std::size_t>(l)] = d.right[static_cast<std::size_t>(letter_generator(n, l) - 1)][letter_iota(n, l)];
  return as;
}

void check_assignment(const MatrixAssignment& as, double tol) {
  const auto& q = as.generators;
  const int n = static_cast<int>(q.size());
  if (n < 1 || n > kMaxFormalN) fail("BadShape", "generator count must lie in 1..4", ErrorClass::input);
  const double cl = clifford_residual(q);
  if (cl > tol) fail("RelationViolation", "Q_iQ_j + Q_jQ_i = -2 delta_ij, residual " + std::to_string(cl));
  if (static_cast<int>(as.letters.size()) > letter_count(n))
    fail("BadShape", "more letter images than letters", ErrorClass::input);
  for (std::size_t l = 0; l < as.letters.size(); ++l) {
    const DenseMatrix& r = as.letters[l];
    if (r.dim() == 0) continue;
    if (r.dim() != q[0].dim()) fail("MismatchedShape", "letter image has the wrong size", ErrorClass::input);
    const unsigned iota = letter_iota(n, static_cast<int>(l));
    for (int h = 1; h <= n; ++h) {
      const DenseMatrix& qh = q[static_cast<std::size_t>(h - 1)];
      const double sign = iota & (1u << (h - 1)) ? -1.0 : 1.0;
      const double res = relative_size(r * qh - sign * (qh * r)) / std::max(1.0, relative_size(r));
      if (res > tol)
        fail("RelationViolation", "r" + std::to_string(l + 1) + " Q_" + std::to_string(h) + " = " +
                                      (sign < 0 ? "-" : "+") + "Q_" + std::to_string(h) + " r" + std::to_string(l + 1) +
                                      " fails, residual " + std::to_string(res));
    }
  }
}

DenseMatrix eval_into_matrices(const FormalElement& e, const MatrixAssignment& as, double tol) {
  check_assignment(as, tol);
  const auto& q = as.generators;
  if (e.n() != static_cast<int>(q.size())) fail("MismatchedShape", "element and assignment use different n");
  const int d = q[0].dim();
  std::vector<DenseMatrix> blades;
  for (unsigned k = 0; k < (1u << e.n()); ++k) {
    DenseMatrix b = DenseMatrix::identity(d);
    for (int h = 0; h < e.n(); ++h)
      if (k & (1u << h)) b = b * q[static_cast<std::size_t>(h)];
    blades.push_back(std::move(b));
  }
  DenseMatrix acc(d);
  for (const auto& [w, c] : e.terms()) {
    DenseMatrix m = DenseMatrix::identity(d);
    for (int l : w.letters()) {
      if (l >= static_cast<int>(as.letters.size()) || as.letters[static_cast<std::size_t>(l)].dim() == 0)
        fail("RelationViolation", "letter r" + std::to_string(l + 1) + " has no image", ErrorClass::input);
      m = m * as.letters[static_cast<std::size_t>(l)];
    }
    acc += to_double(c) * (m * blades[w.qmask()]);
  }
  return acc;
}

MatrixTuple eval_into_matrices(const Tuple<FormalElement>& e, const MatrixAssignment& as, double tol) {
  MatrixTuple out;
  for (const auto& x : e) out.push_back(eval_into_matrices(x, as, tol));
  return out;
}

}  // namespace fqo
