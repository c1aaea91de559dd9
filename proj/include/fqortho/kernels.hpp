#pragma once

#include <cstddef>

namespace fqo::kernels {

// c = a * b for square row-major d x d blocks.
void gemm(int d, const double* a, const double* b, double* c);
// y += alpha * x
void axpy(std::size_t len, double alpha, const double* x, double* y);
double sum_squares(std::size_t len, const double* x);

const char* active_variant();
// Forces the portable path; also selected by FQORTHO_FORCE_SCALAR=1.
void force_scalar(bool on);

namespace scalar {
void gemm(int d, const double* a, const double* b, double* c);
void axpy(std::size_t len, double alpha, const double* x, double* y);
double sum_squares(std::size_t len, const double* x);
}  // namespace scalar

namespace avx2 {
bool available();
void gemm(int d, const double* a, const double* b, double* c);
void axpy(std::size_t len, double alpha, const double* x, double* y);
double sum_squares(std::size_t len, const double* x);
}  // namespace avx2

}  // namespace fqo::kernels
