#include "fqortho/kernels.hpp"

namespace fqo::kernels::scalar {

void gemm(int d, const double* a, const double* b, double* c) {
  for (int i = 0; i < d * d; ++i) c[i] = 0.0;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const double aik = a[i * d + k];
      const double* brow = b + k * d;
      double* crow = c + i * d;
      for (int j = 0; j < d; ++j) crow[j] += aik * brow[j];
    }
}

void axpy(std::size_t len, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

double sum_squares(std::size_t len, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += x[i] * x[i];
  return s;
}

}  // namespace fqo::kernels::scalar
