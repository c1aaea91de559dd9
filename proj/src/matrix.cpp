#include "fqortho/matrix.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>

#include "fqortho/kernels.hpp"

namespace fqo {

DenseMatrix DenseMatrix::identity(int d) {
  DenseMatrix m(d);
  for (int i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int d = static_cast<int>(rows.size());
  DenseMatrix m(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) fail("BadShape", "matrix rows must form a square", ErrorClass::input);
    for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

DenseMatrix DenseMatrix::from_row_major(int d, const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(d) * d)
    fail("BadShape", "expected d*d matrix entries", ErrorClass::input);
  DenseMatrix m(d);
  m.a_ = values;
  return m;
}

DenseMatrix DenseMatrix::from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix m(static_cast<int>(e.rows()));
  for (int i = 0; i < m.d_; ++i)
    for (int j = 0; j < m.d_; ++j) m(i, j) = e(i, j);
  return m;
}

Eigen::MatrixXd DenseMatrix::to_eigen() const {
  Eigen::MatrixXd e(d_, d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) e(i, j) = (*this)(i, j);
  return e;
}

std::vector<std::vector<double>> DenseMatrix::rows() const {
  std::vector<std::vector<double>> r(d_, std::vector<double>(d_));
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) r[i][j] = (*this)(i, j);
  return r;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::trace() const {
  double s = 0;
  for (int i = 0; i < d_; ++i) s += (*this)(i, i);
  return s;
}

double DenseMatrix::frobenius() const { return std::sqrt(kernels::sum_squares(a_.size(), a_.data())); }

bool DenseMatrix::all_finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

DenseMatrix DenseMatrix::operator-() const {
  DenseMatrix m(*this);
  for (double& v : m.a_) v = -v;
  return m;
}

void DenseMatrix::check_same(const DenseMatrix& b) const {
  if (d_ != b.d_) fail("MismatchedShape", "matrix dimensions differ");
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& b) {
  check_same(b);
  kernels::axpy(a_.size(), 1.0, b.a_.data(), a_.data());
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& b) {
  check_same(b);
  kernels::axpy(a_.size(), -1.0, b.a_.data(), a_.data());
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  a.check_same(b);
  DenseMatrix c(a.d_);
  kernels::gemm(a.d_, a.data(), b.data(), c.data());
  return c;
}

double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).frobenius(); }

double tuple_distance(const MatrixTuple& a, const MatrixTuple& b) {
  if (a.size() != b.size()) fail("MismatchedShape", "tuple sizes differ");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double f = frobenius_distance(a[i], b[i]);
    s += f * f;
  }
  return std::sqrt(s);
}

double tuple_norm(const MatrixTuple& a) {
  double s = 0;
  for (const auto& m : a) s += m.frobenius() * m.frobenius();
  return std::sqrt(s);
}

DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b) { return a * b - b * a; }
DenseMatrix anticommutator(const DenseMatrix& a, const DenseMatrix& b) { return a * b + b * a; }

double determinant(const DenseMatrix& a) { return a.to_eigen().partialPivLu().determinant(); }

DenseMatrix mat_inverse(const DenseMatrix& a) {
  Eigen::MatrixXd e = a.to_eigen();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
  const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
  lu.setThreshold(1e-13);
  if (!lu.isInvertible() || std::abs(lu.maxPivot()) < 1e-300)
    fail("Singular", "matrix is numerically singular");
  double smallest = std::abs(lu.matrixLU()(a.dim() - 1, a.dim() - 1));
  if (smallest < 1e-14 * scale) fail("Singular", "pivot below threshold");
  return DenseMatrix::from_eigen(lu.inverse());
}

DenseMatrix expm(const DenseMatrix& a) { return DenseMatrix::from_eigen(a.to_eigen().exp()); }

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return a.colPivHouseholderQr().solve(b);
}

SpectrumReport spectrum(const DenseMatrix& h) {
  Eigen::VectorXcd values;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(h.to_eigen(), false);
  if (solver.info() == Eigen::Success) {
    values = solver.eigenvalues();
  } else {
    // real Schur iteration can stall on highly degenerate spectra; the complex one does not
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> csolver(h.to_eigen().cast<std::complex<double>>(), false);
    if (csolver.info() != Eigen::Success)
      fail("NoConvergence", "eigenvalue iteration did not converge", ErrorClass::convergence);
    values = csolver.eigenvalues();
  }
  SpectrumReport rep;
  rep.min_real_axis_distance = std::numeric_limits<double>::infinity();
  rep.min_left_halfplane_margin = std::numeric_limits<double>::infinity();
  rep.min_real_part = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::complex<double> z = values[i];
    rep.eigenvalues.push_back(z);
    rep.min_real_axis_distance = std::min(rep.min_real_axis_distance, std::abs(z.imag()));
    double margin = z.real() >= 0 ? std::abs(z) : std::abs(z.imag());
    rep.min_left_halfplane_margin = std::min(rep.min_left_halfplane_margin, margin);
    rep.min_real_part = std::min(rep.min_real_part, z.real());
  }
  return rep;
}

namespace {

double abs_det_root(const DenseMatrix& m) {
  double det = std::abs(determinant(m));
  if (!(det > 0) || !std::isfinite(det)) return 1.0;
  return std::pow(det, -1.0 / m.dim());
}

}  // namespace

DenseMatrix inv_sqrt_matrix(const DenseMatrix& s, const MatrixOptions& opt) {
  SpectrumReport rep = spectrum(s);
  if (rep.min_left_halfplane_margin <= opt.guard_tol)
    fail("SpectralConditionViolated", "spectrum touches (-inf, 0]");
  const int d = s.dim();
  DenseMatrix y = s;
  DenseMatrix z = DenseMatrix::identity(d);
  bool settled = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    // scaled Denman-Beavers step; y -> S^{1/2}, z -> S^{-1/2}
    double mu = std::sqrt(abs_det_root(y) * abs_det_root(z));
    if (it > 6) mu = 1.0;
    DenseMatrix yn = 0.5 * (mu * y + (1.0 / mu) * mat_inverse(z));
    DenseMatrix zn = 0.5 * (mu * z + (1.0 / mu) * mat_inverse(y));
    double change = frobenius_distance(zn, z);
    y = std::move(yn);
    z = std::move(zn);
    if (!z.all_finite()) break;
    if (settled) return z;
    settled = change <= 1e-10 * std::max(1.0, z.frobenius());
  }
  DenseMatrix check = z * z * s - DenseMatrix::identity(d);
  if (z.all_finite() && check.frobenius() <= 1e-10 * d) return z;
  fail("NoConvergence", "inverse square root iteration stalled", ErrorClass::convergence);
}

DenseMatrix inv_sqrt_quadrature(const DenseMatrix& s, int nodes) {
  const int d = s.dim();
  DenseMatrix acc(d);
  const DenseMatrix id = DenseMatrix::identity(d);
  for (int k = 0; k < nodes; ++k) {
    double t = std::numbers::pi * k / nodes;  // integrand has period pi
    double c = std::cos(t), sn = std::sin(t);
    DenseMatrix m = (c * c) * id + (sn * sn) * s;
    try {
      acc += mat_inverse(m);
    } catch (const Error&) {
      fail("NodeSingular", "quadrature node " + std::to_string(t) + " is singular");
    }
  }
  return acc * (1.0 / nodes);
}

DenseMatrix pol_matrix(const DenseMatrix& h, const MatrixOptions& opt) {
  SpectrumReport rep = spectrum(h);
  if (rep.min_real_axis_distance <= opt.guard_tol)
    fail("SpectralConditionViolated", "spectrum meets the real axis");
  const int d = h.dim();
  DenseMatrix x = h;
  bool settled = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    // scaled Newton step for X^2 = -1
    double mu = it < 8 ? abs_det_root(x) : 1.0;
    DenseMatrix xs = mu * x;
    DenseMatrix xn = 0.5 * (xs - mat_inverse(xs));
    double change = frobenius_distance(xn, x);
    x = std::move(xn);
    if (!x.all_finite()) break;
    if (settled) return x;
    settled = change <= 1e-10 * std::max(1.0, x.frobenius());
  }
  DenseMatrix check = x * x + DenseMatrix::identity(d);
  if (x.all_finite() && check.frobenius() <= 1e-10 * d) return x;
  fail("NoConvergence", "polarization iteration stalled", ErrorClass::convergence);
}

DenseMatrix pol_quadrature(const DenseMatrix& h, int nodes) {
  const int d = h.dim();
  DenseMatrix acc(d);
  const DenseMatrix id = DenseMatrix::identity(d);
  for (int k = 0; k < nodes; ++k) {
    double t = std::numbers::pi * k / nodes;  // integrand has period pi
    double c = std::cos(t), sn = std::sin(t);
    DenseMatrix den = c * id + sn * h;
    DenseMatrix inv;
    try {
      inv = mat_inverse(den);
    } catch (const Error&) {
      fail("NodeSingular", "quadrature node " + std::to_string(t) + " is singular");
    }
    acc += ((-sn) * id + c * h) * inv;
  }
  return acc * (1.0 / nodes);
}

}  // namespace fqo
