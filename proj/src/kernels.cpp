#include <atomic>
#include <cstdlib>
#include <cstring>

#include "fqortho/kernels.hpp"

namespace fqo::kernels {
namespace {

struct Table {
  void (*gemm)(int, const double*, const double*, double*);
  void (*axpy)(std::size_t, double, const double*, double*);
  double (*sum_squares)(std::size_t, const double*);
  const char* name;
};

constexpr Table kScalar{scalar::gemm, scalar::axpy, scalar::sum_squares, "scalar"};
constexpr Table kAvx2{avx2::gemm, avx2::axpy, avx2::sum_squares, "avx2"};

bool env_forces_scalar() {
  const char* v = std::getenv("FQORTHO_FORCE_SCALAR");
  return v != nullptr && std::strcmp(v, "0") != 0 && *v != '\0';
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{(!env_forces_scalar() && avx2::available()) ? &kAvx2 : &kScalar};
  return table;
}

}  // namespace

void gemm(int d, const double* a, const double* b, double* c) { current().load()->gemm(d, a, b, c); }
void axpy(std::size_t len, double alpha, const double* x, double* y) {
  current().load()->axpy(len, alpha, x, y);
}
double sum_squares(std::size_t len, const double* x) { return current().load()->sum_squares(len, x); }
const char* active_variant() { return current().load()->name; }

void force_scalar(bool on) {
  current().store((!on && !env_forces_scalar() && avx2::available()) ? &kAvx2 : &kScalar);
}

}  // namespace fqo::kernels
