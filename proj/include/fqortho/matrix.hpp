#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "fqortho/errors.hpp"
#include "fqortho/rational.hpp"

namespace fqo {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(int d) : d_(d), a_(static_cast<std::size_t>(d) * d, 0.0) {
    if (d < 1) fail("BadShape", "matrix dimension must be positive", ErrorClass::input);
  }
  static DenseMatrix identity(int d);
  static DenseMatrix zero(int d) { return DenseMatrix(d); }
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static DenseMatrix from_row_major(int d, const std::vector<double>& values);
  static DenseMatrix from_eigen(const Eigen::MatrixXd& m);

  int dim() const { return d_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * d_ + j]; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * d_ + j]; }
  const double* data() const { return a_.data(); }
  double* data() { return a_.data(); }
  const std::vector<double>& values() const { return a_; }
  Eigen::MatrixXd to_eigen() const;
  std::vector<std::vector<double>> rows() const;

  DenseMatrix transpose() const;
  double trace() const;
  double frobenius() const;
  bool all_finite() const;

  DenseMatrix operator-() const;
  DenseMatrix& operator+=(const DenseMatrix& b);
  DenseMatrix& operator-=(const DenseMatrix& b);
  DenseMatrix& operator*=(double s);
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }
  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

 private:
  void check_same(const DenseMatrix& b) const;
  int d_ = 0;
  std::vector<double> a_;
};

using MatrixTuple = std::vector<DenseMatrix>;

double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b);
double tuple_distance(const MatrixTuple& a, const MatrixTuple& b);
double tuple_norm(const MatrixTuple& a);
DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix anticommutator(const DenseMatrix& a, const DenseMatrix& b);
double determinant(const DenseMatrix& a);

// Uniform element interface shared with the formal backend.
inline DenseMatrix one_like(const DenseMatrix& x) { return DenseMatrix::identity(x.dim()); }
inline DenseMatrix zero_like(const DenseMatrix& x) { return DenseMatrix::zero(x.dim()); }
inline DenseMatrix scale(const DenseMatrix& x, const Rational& s) { return x * to_double(s); }
inline DenseMatrix scale(const DenseMatrix& x, double s) { return x * s; }
inline double magnitude(const DenseMatrix& x) { return x.frobenius(); }

DenseMatrix mat_inverse(const DenseMatrix& a);
inline DenseMatrix inverse(const DenseMatrix& a) { return mat_inverse(a); }
DenseMatrix expm(const DenseMatrix& a);
// Solves a x = b in the least-squares sense (Householder QR with column pivoting).
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  double min_real_axis_distance = 0;
  double min_left_halfplane_margin = 0;  // distance to (-inf, 0]
  double min_real_part = 0;
};

SpectrumReport spectrum(const DenseMatrix& h);

struct MatrixOptions {
  double guard_tol = 1e-6;
  int max_iter = 100;
};

DenseMatrix inv_sqrt_matrix(const DenseMatrix& s, const MatrixOptions& opt = {});
DenseMatrix inv_sqrt_quadrature(const DenseMatrix& s, int nodes);
DenseMatrix pol_matrix(const DenseMatrix& h, const MatrixOptions& opt = {});
DenseMatrix pol_quadrature(const DenseMatrix& h, int nodes);

}  // namespace fqo
