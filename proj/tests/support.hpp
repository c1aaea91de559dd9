#pragma once

#include <random>

#include "fqortho/formal.hpp"
#include "fqortho/geometry.hpp"
#include "fqortho/matrix.hpp"

namespace testsupport {

using namespace fqo;

// Left multiplication by the quaternion units i, j, k on R^4.
inline MatrixTuple quaternion_units() {
  DenseMatrix i = DenseMatrix::from_rows({{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}});
  DenseMatrix j = DenseMatrix::from_rows({{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}});
  DenseMatrix k = DenseMatrix::from_rows({{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}});
  return {i, j, k};
}

inline MatrixTuple clifford_matrices(int n) {
  MatrixTuple u = quaternion_units();
  if (n == 1) return {DenseMatrix::from_rows({{0, -1}, {1, 0}})};
  return MatrixTuple(u.begin(), u.begin() + n);
}

inline DenseMatrix random_matrix(std::mt19937& rng, int d, double size) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
  return m * (size / m.frobenius());
}

inline MatrixTuple random_tuple(std::mt19937& rng, int n, int d, double size) {
  MatrixTuple t;
  for (int i = 0; i < n; ++i) t.push_back(random_matrix(rng, d, size));
  return t;
}

// A random Clifford system conjugate to the standard one.
inline MatrixTuple random_clifford(std::mt19937& rng, int n, double spread = 0.3) {
  MatrixTuple q = clifford_matrices(n);
  DenseMatrix g = DenseMatrix::identity(q[0].dim()) + random_matrix(rng, q[0].dim(), spread);
  return Ad(g, q);
}

inline Rational random_rational(std::mt19937& rng, int span = 5, int den = 4) {
  std::uniform_int_distribution<int> num(-span, span);
  std::uniform_int_distribution<int> d(1, den);
  return rat(num(rng), d(rng));
}

// Sum of `terms` random words with the given letter-degree range.
inline FormalElement random_formal(std::mt19937& rng, int n, int cap, int min_deg, int max_deg, int terms) {
  std::uniform_int_distribution<int> letter(0, letter_count(n) - 1);
  std::uniform_int_distribution<unsigned> mask(0, (1u << n) - 1);
  std::uniform_int_distribution<int> deg(min_deg, max_deg);
  FormalElement x(n, cap);
  for (int i = 0; i < terms; ++i) {
    std::vector<int> letters(deg(rng));
    for (int& l : letters) l = letter(rng);
    x += FormalElement::monomial(n, cap, Word::make(n, letters, mask(rng)), random_rational(rng));
  }
  return x;
}

inline Tuple<FormalElement> random_formal_tuple(std::mt19937& rng, int n, int cap, int min_deg, int max_deg,
                                                int terms) {
  Tuple<FormalElement> t;
  for (int i = 0; i < n; ++i) t.push_back(random_formal(rng, n, cap, min_deg, max_deg, terms));
  return t;
}

inline Tuple<FormalElement> formal_base(int n, int cap) { return base_generators<Rational>(n, cap); }

}  // namespace testsupport
