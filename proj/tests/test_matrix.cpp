#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fqortho/kernels.hpp"
#include "support.hpp"

using namespace fqo;
using namespace testsupport;

namespace {

// Matrix with spectrum near +-i*scale, generic otherwise.
DenseMatrix skewish(std::mt19937& rng, double noise) {
  auto q = clifford_matrices(3);
  std::uniform_real_distribution<double> u(0.6, 1.6);
  DenseMatrix g = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.4);
  DenseMatrix h = u(rng) * q[0] + 0.3 * u(rng) * DenseMatrix::identity(4) + random_matrix(rng, 4, noise);
  return g * h * mat_inverse(g);
}

DenseMatrix random_spd(std::mt19937& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m = random_matrix(rng, d, 1.0).to_eigen();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd o = qr.householderQ();
  Eigen::VectorXd diag(d);
  for (int i = 0; i < d; ++i) diag(i) = u(rng);
  return DenseMatrix::from_eigen(o * diag.asDiagonal() * o.transpose());
}

}  // namespace

TEST_CASE("kernel variants agree") {
  std::mt19937 rng(21);
  for (int d : {1, 2, 3, 4, 5, 7, 8, 13}) {
    DenseMatrix a = random_matrix(rng, d, 3.0), b = random_matrix(rng, d, 3.0);
    std::vector<double> c1(d * d), c2(d * d);
    kernels::scalar::gemm(d, a.data(), b.data(), c1.data());
    if (kernels::avx2::available()) {
      kernels::avx2::gemm(d, a.data(), b.data(), c2.data());
      for (int i = 0; i < d * d; ++i) CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-13));
      std::vector<double> y1(a.values()), y2(a.values());
      kernels::scalar::axpy(y1.size(), 0.7, b.data(), y1.data());
      kernels::avx2::axpy(y2.size(), 0.7, b.data(), y2.data());
      for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));
      CHECK(kernels::scalar::sum_squares(d * d, a.data()) ==
            doctest::Approx(kernels::avx2::sum_squares(d * d, a.data())).epsilon(1e-13));
    }
  }
  kernels::force_scalar(true);
  CHECK(std::string(kernels::active_variant()) == "scalar");
  kernels::force_scalar(false);
}

TEST_CASE("inverse and spectrum") {
  CHECK(frobenius_distance(mat_inverse(DenseMatrix::identity(3)), DenseMatrix::identity(3)) == 0);
  auto inv = mat_inverse(DenseMatrix::from_rows({{2, 0}, {0, 4}}));
  CHECK(inv(0, 0) == doctest::Approx(0.5));
  CHECK(inv(1, 1) == doctest::Approx(0.25));
  std::mt19937 rng(22);
  DenseMatrix a = DenseMatrix::identity(8) * 3.0 + random_matrix(rng, 8, 2.0);
  CHECK((a * mat_inverse(a) - DenseMatrix::identity(8)).frobenius() <= 1e-10 * a.frobenius() * 8);
  CHECK_THROWS_AS(mat_inverse(DenseMatrix::from_rows({{1, 2}, {2, 4}})), Error);

  auto j = DenseMatrix::from_rows({{0, -1}, {1, 0}});
  auto sj = spectrum(j);
  CHECK(sj.min_real_axis_distance == doctest::Approx(1.0));
  CHECK(spectrum(DenseMatrix::from_rows({{1, 0}, {0, 2}})).min_real_axis_distance == doctest::Approx(0.0));
  // companion matrix of (x-1)(x-2)(x+3) = x^3 - 7x + 6
  auto comp = DenseMatrix::from_rows({{0, 0, -6}, {1, 0, 7}, {0, 1, 0}});
  auto sc = spectrum(comp);
  std::vector<double> re;
  for (auto z : sc.eigenvalues) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-3).epsilon(1e-9));
  CHECK(re[1] == doctest::Approx(1).epsilon(1e-9));
  CHECK(re[2] == doctest::Approx(2).epsilon(1e-9));
}

TEST_CASE("inverse square root") {
  CHECK(frobenius_distance(inv_sqrt_matrix(DenseMatrix::identity(3)), DenseMatrix::identity(3)) < 1e-14);
  CHECK(frobenius_distance(inv_sqrt_matrix(DenseMatrix::identity(3) * 4.0), DenseMatrix::identity(3) * 0.5) < 1e-14);
  CHECK(frobenius_distance(inv_sqrt_quadrature(DenseMatrix::identity(2), 8), DenseMatrix::identity(2)) < 1e-15);
  CHECK(frobenius_distance(inv_sqrt_quadrature(DenseMatrix::identity(2) * 4.0, 64), DenseMatrix::identity(2) * 0.5) <
        1e-10);
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    DenseMatrix s = random_spd(rng, 6, 0.1, 10);
    DenseMatrix x = inv_sqrt_matrix(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.to_eigen());
    Eigen::MatrixXd oracle = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                             es.eigenvectors().transpose();
    CHECK(frobenius_distance(x, DenseMatrix::from_eigen(oracle)) < 1e-9);
    CHECK(frobenius_distance(x * s, s * x) < 1e-9);
    CHECK(frobenius_distance(x * x * s, DenseMatrix::identity(6)) < 1e-9);
    CHECK(frobenius_distance(inv_sqrt_quadrature(s, 256), x) < 1e-8);
  }
  // non-symmetric input with spectrum off the negative axis
  DenseMatrix s = DenseMatrix::identity(4) * 2.0 + random_matrix(rng, 4, 1.0);
  DenseMatrix x = inv_sqrt_matrix(s);
  CHECK(frobenius_distance(x * x * s, DenseMatrix::identity(4)) < 1e-9);
  CHECK(spectrum(x).min_real_part > 0);
  CHECK_THROWS_AS(inv_sqrt_matrix(DenseMatrix::from_rows({{-1, 0}, {0, 1}})), Error);
}

TEST_CASE("polarization") {
  auto j = DenseMatrix::from_rows({{0, -1}, {1, 0}});
  CHECK(frobenius_distance(pol_matrix(j), j) < 1e-14);
  CHECK(frobenius_distance(pol_matrix(j * 3.0), j) < 1e-14);
  CHECK(frobenius_distance(pol_quadrature(j, 16), j) < 1e-12);
  CHECK(frobenius_distance(pol_quadrature(j * 3.0, 64), j) < 1e-10);
  CHECK_THROWS_AS(pol_matrix(DenseMatrix::identity(2)), Error);
  std::mt19937 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix h = skewish(rng, 0.2);
    DenseMatrix p = pol_matrix(h);
    CHECK(frobenius_distance(p * p, -DenseMatrix::identity(4)) < 1e-9);
    CHECK(frobenius_distance(p * h, h * p) < 1e-9);
    CHECK(spectrum(h * mat_inverse(p)).min_real_part > 0);
    CHECK(frobenius_distance(pol_quadrature(h, 256), p) < 1e-8);
  }
}
