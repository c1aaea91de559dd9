#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fqortho/omega.hpp"

namespace fqo {

// ---------------------------------------------------------------------------
// truncated power series in t with matrix coefficients

class MatrixSeries {
 public:
  MatrixSeries() = default;
  MatrixSeries(int d, int order) : c_(static_cast<std::size_t>(order) + 1, DenseMatrix(d)) {}
  static MatrixSeries constant(const DenseMatrix& m, int order);
  // m0 + t m1
  static MatrixSeries linear(const DenseMatrix& m0, const DenseMatrix& m1, int order);

  int dim() const { return c_.empty() ? 0 : c_[0].dim(); }
  int order() const { return static_cast<int>(c_.size()) - 1; }
  const DenseMatrix& operator[](int k) const { return c_.at(static_cast<std::size_t>(k)); }
  DenseMatrix& operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }
  // sum of the coefficients, the value at t = 1
  DenseMatrix sum() const;
  int valuation(double tol) const;

  MatrixSeries operator-() const;
  MatrixSeries& operator+=(const MatrixSeries& b);
  MatrixSeries& operator-=(const MatrixSeries& b);
  MatrixSeries& operator*=(double s);
  friend MatrixSeries operator+(MatrixSeries a, const MatrixSeries& b) { return a += b; }
  friend MatrixSeries operator-(MatrixSeries a, const MatrixSeries& b) { return a -= b; }
  friend MatrixSeries operator*(MatrixSeries a, double s) { return a *= s; }
  friend MatrixSeries operator*(const MatrixSeries& a, const MatrixSeries& b);

 private:
  std::vector<DenseMatrix> c_;
};

inline MatrixSeries scale(const MatrixSeries& x, const Rational& s) { return x * to_double(s); }
inline MatrixSeries scale(const MatrixSeries& x, double s) { return x * s; }
MatrixSeries one_like(const MatrixSeries& x);
MatrixSeries zero_like(const MatrixSeries& x);
MatrixSeries inverse(const MatrixSeries& x);
MatrixSeries exp_element(const MatrixSeries& x);
double relative_size(const MatrixSeries& x);
inline double default_tolerance(const MatrixSeries&) { return 1e-8; }
inline MatrixSeries conjugate(const MatrixSeries& x, const MatrixSeries& q, const MatrixSeries& qinv) {
  return qinv * x * q;
}

// ---------------------------------------------------------------------------
// fixed-point iteration at matrix scale

struct IterationOptions {
  double tol = 1e-12;
  int max_iter = 500;
  int stall_window = 20;  // step halvings without a residual decrease before NoContraction
};

struct IterationResult {
  MatrixTuple system;
  int iterations = 0;
  double residual = 0;  // |Pi_Q (A - Q)| or |Pi^f_Q A - (1/2, 1/2)|
  std::vector<double> history;
};

// Step iteration of a connection from `start`.
IterationResult iterate_omega_matrix(const RealConnection& w, const MatrixTuple& a, const MatrixTuple& start,
                                     bool floating, const IterationOptions& opt = {});

// Symmetric orthogonalization: Step iteration from ogs(a).
GSResult<DenseMatrix> o_sy_matrix(const MatrixTuple& a, const IterationOptions& opt = {},
                                  IterationResult* run = nullptr);
// Floating symmetric orthogonalization: floating Step iteration from ofgs(a).
GSResult<DenseMatrix> o_fsy_matrix(const MatrixTuple& a, const IterationOptions& opt = {},
                                   IterationResult* run = nullptr);
// Weighted (ordinary) orthogonalization: Step iteration from ogs(a).
IterationResult o_weighted_matrix(const std::vector<double>& weights, const MatrixTuple& a,
                                  const IterationOptions& opt = {});

// sum_i [A_i, Q_i] and max(|sum A_i Q_i^{-1} - n|, |sum Q_i^{-1} A_i - n|), relative sizes.
double mtc_residual(const MatrixTuple& a, const MatrixTuple& q);
double mti_residual(const MatrixTuple& a, const MatrixTuple& q);

// ---------------------------------------------------------------------------
// anchored series

struct AnchoringResult {
  MatrixTuple system;               // P(1)
  std::vector<MatrixTuple> terms;   // d_r Psi(Q; A - Q) / r!, r = 0..r_max
  std::vector<double> term_norms;
  double tail_estimate = 0;
};

// Taylor data of t -> O^Sy(Q + t (A - Q)) at Q = ogs(a), computed order by order, summed at t = 1.
AnchoringResult gs_anchoring(const MatrixTuple& a, int r_max, double tol = 1e-12, int window = 3);

// ---------------------------------------------------------------------------
// orthogonal averaging

using OrthogonalMatrix = std::vector<std::vector<double>>;

struct AverageReport {
  double max_deviation = 0;
  std::size_t samples = 0;
  bool pass = false;
};

// (U a)_i = sum_j U_ij a_j
MatrixTuple rotate_inputs(const OrthogonalMatrix& u, const MatrixTuple& a);
// identity, all signed permutations, `random_rotations` Haar rotations from `seed`
std::vector<OrthogonalMatrix> orthogonal_samples(int n, int random_rotations = 8, std::uint32_t seed = 1);
OrthogonalMatrix plane_rotation(int n, double theta);
// max pairwise deviation of U^{-1} method(U a) over the samples
AverageReport orthogonal_average_check(const MatrixOperation& method, const MatrixTuple& a,
                                       const std::vector<OrthogonalMatrix>& samples, double tol = 1e-8);

// ---------------------------------------------------------------------------
// closed n = 2 floating formula

struct ClosedFsyReport {
  double floating_residual = 0;
  double alternative_form_deviation = 0;
  double mti_residual = 0;
};

// ((A_1 + pol(A_1 A_2^{-1}) A_2) / 2, (A_2 + pol(A_2 A_1^{-1}) A_1) / 2)
MatrixTuple closed_fsy_n2(const DenseMatrix& a1, const DenseMatrix& a2, ClosedFsyReport* report = nullptr,
                          double guard = 1e-6);
// max over (lambda_1, lambda_2) samples of |lambda_1 B_1^{-1} + lambda_2 B_2^{-1} - int (l . c)(A . c)^{-1} dt / pi| (relative)
double inverse_system_identity_residual(const DenseMatrix& a1, const DenseMatrix& a2, const MatrixTuple& b,
                                        int nodes = 256);

// ---------------------------------------------------------------------------
// weighted limit probe

// Distances between O^{(w)}(A) and the last n components of O^{f(u, w)}(1, A) for each u.
std::vector<double> weighted_limit_probe(const std::vector<double>& weights, const MatrixTuple& a,
                                         const std::vector<double>& us, const IterationOptions& opt = {});

}  // namespace fqo
