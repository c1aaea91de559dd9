#include <immintrin.h>

#include "fqortho/kernels.hpp"

namespace fqo::kernels::avx2 {

bool available() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

void gemm(int d, const double* a, const double* b, double* c) {
  for (int i = 0; i < d * d; ++i) c[i] = 0.0;
  for (int i = 0; i < d; ++i) {
    double* crow = c + i * d;
    for (int k = 0; k < d; ++k) {
      const __m256d aik = _mm256_set1_pd(a[i * d + k]);
      const double* brow = b + k * d;
      int j = 0;
      for (; j + 4 <= d; j += 4) {
        __m256d acc = _mm256_loadu_pd(crow + j);
        acc = _mm256_fmadd_pd(aik, _mm256_loadu_pd(brow + j), acc);
        _mm256_storeu_pd(crow + j, acc);
      }
      for (; j < d; ++j) crow[j] += a[i * d + k] * brow[j];
    }
  }
}

void axpy(std::size_t len, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < len; ++i) y[i] += alpha * x[i];
}

double sum_squares(std::size_t len, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < len; ++i) s += x[i] * x[i];
  return s;
}

}  // namespace fqo::kernels::avx2
