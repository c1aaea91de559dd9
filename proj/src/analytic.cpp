#include "fqortho/analytic.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace fqo {

// ---------------------------------------------------------------------------
// MatrixSeries

MatrixSeries MatrixSeries::constant(const DenseMatrix& m, int order) {
  MatrixSeries s(m.dim(), order);
  s[0] = m;
  return s;
}

MatrixSeries MatrixSeries::linear(const DenseMatrix& m0, const DenseMatrix& m1, int order) {
  MatrixSeries s = constant(m0, order);
  if (order >= 1) s[1] = m1;
  return s;
}

DenseMatrix MatrixSeries::sum() const {
  DenseMatrix acc(dim());
  for (const auto& m : c_) acc += m;
  return acc;
}

int MatrixSeries::valuation(double tol) const {
  for (int k = 0; k <= order(); ++k)
    if (relative_size(c_[static_cast<std::size_t>(k)]) > tol) return k;
  return order() + 1;
}

MatrixSeries MatrixSeries::operator-() const {
  MatrixSeries out = *this;
  for (auto& m : out.c_) m = -m;
  return out;
}

MatrixSeries& MatrixSeries::operator+=(const MatrixSeries& b) {
  if (b.c_.size() != c_.size()) fail("MismatchedShape", "series orders differ");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += b.c_[k];
  return *this;
}

MatrixSeries& MatrixSeries::operator-=(const MatrixSeries& b) {
  if (b.c_.size() != c_.size()) fail("MismatchedShape", "series orders differ");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= b.c_[k];
  return *this;
}

MatrixSeries& MatrixSeries::operator*=(double s) {
  for (auto& m : c_) m *= s;
  return *this;
}

MatrixSeries operator*(const MatrixSeries& a, const MatrixSeries& b) {
  if (a.order() != b.order()) fail("MismatchedShape", "series orders differ");
  MatrixSeries out(a.dim(), a.order());
  for (int i = 0; i <= a.order(); ++i)
    for (int j = 0; i + j <= a.order(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

MatrixSeries one_like(const MatrixSeries& x) { return MatrixSeries::constant(DenseMatrix::identity(x.dim()), x.order()); }
MatrixSeries zero_like(const MatrixSeries& x) { return MatrixSeries(x.dim(), x.order()); }

MatrixSeries inverse(const MatrixSeries& x) {
  const DenseMatrix x0inv = mat_inverse(x[0]);
  MatrixSeries out(x.dim(), x.order());
  out[0] = x0inv;
  for (int k = 1; k <= x.order(); ++k) {
    DenseMatrix acc(x.dim());
    for (int j = 1; j <= k; ++j) acc += x[j] * out[k - j];
    out[k] = -(x0inv * acc);
  }
  return out;
}

MatrixSeries exp_element(const MatrixSeries& x) {
  if (relative_size(x[0]) > 0) fail("NonNilpotentArgument", "series exp needs a vanishing constant term");
  MatrixSeries acc = one_like(x), power = one_like(x);
  for (int k = 1; k <= x.order(); ++k) {
    power = power * x * (1.0 / k);
    acc += power;
  }
  return acc;
}

double relative_size(const MatrixSeries& x) {
  double m = 0;
  for (int k = 0; k <= x.order(); ++k) m = std::max(m, relative_size(x[k]));
  return m;
}

// ---------------------------------------------------------------------------
// iteration

namespace {

GSResult<DenseMatrix> symmetric_result(const MatrixTuple& a, const IterationResult& r, bool floating) {
  GSResult<DenseMatrix> out;
  out.system = r.system;
  out.floating = floating;
  out.cp_residual = floating ? floating_residual(r.system, 1) : clifford_residual(r.system);
  out.lgs_residual = floating ? mti_residual(a, r.system) : mtc_residual(a, r.system);
  out.nsp_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.size(); ++k)
    out.nsp_margin = std::min(out.nsp_margin, min_real_part(a[k] * mat_inverse(r.system[k])));
  return out;
}

// Mean scalar part of a_i q_i^{-1}. The symmetric and weighted fixed points are invariant under
// positive uniform scaling, while the Step gain near the fixed point is 1 - s.
double uniform_scale(const MatrixTuple& a, const MatrixTuple& q) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] * mat_inverse(q[i])).trace();
  acc /= double(a.size()) * q[0].dim();
  return std::isfinite(acc) && acc > 0 ? acc : 1.0;
}

IterationResult iterate_normalized(const RealConnection& w, const MatrixTuple& a, const IterationOptions& opt) {
  const MatrixTuple start = gs_chain(a);
  return iterate_omega_matrix(w, tuple_scale(a, 1.0 / uniform_scale(a, start)), start, false, opt);
}

}  // namespace

IterationResult iterate_omega_matrix(const RealConnection& w, const MatrixTuple& a, const MatrixTuple& start,
                                     bool floating, const IterationOptions& opt) {
  if (opt.max_iter < 0) fail("BadOption", "max_iter must be non-negative", ErrorClass::input);
  if (opt.stall_window < 0) fail("BadOption", "stall_window must be non-negative", ErrorClass::input);
  struct State {
    MatrixTuple q;
    DenseMatrix x;
    FPair<DenseMatrix> p;
    double res = 0;
  };
  auto evaluate = [&](MatrixTuple q) {
    State s{std::move(q), {}, {}, 0};
    if (!floating) {
      s.x = connection_apply(w, s.q, tuple_sub(a, s.q));
      s.res = relative_size(s.x);
    } else {
      s.p = fpair_sub(connection_apply_floating(w, s.q, a), half_unit_pair(s.q[0]));
      s.res = std::max(relative_size(s.p.left), relative_size(s.p.right));
    }
    return s;
  };
  auto stepped = [&](const State& s, double theta) {
    if (!floating) return Ad(expm(s.x * theta), s.q);
    return Ad_f(exp_f(FPair<DenseMatrix>{s.p.left * theta, s.p.right * theta}), s.q);
  };

  IterationResult out;
  State cur = evaluate(start);
  if (!std::isfinite(cur.res)) fail("NoContraction", "residual is not finite", ErrorClass::convergence);
  out.history.push_back(cur.res);
  double theta = 1.0;
  for (int it = 0;; ++it) {
    if (cur.res <= opt.tol) {
      out.system = std::move(cur.q);
      out.iterations = it;
      out.residual = cur.res;
      return out;
    }
    if (it >= opt.max_iter)
      fail("NoConvergence", "no fixed point within " + std::to_string(opt.max_iter) + " iterations",
           ErrorClass::convergence);
    // Full steps overshoot when the input is badly scaled; halve until the residual drops.
    int halvings = 0;
    for (;;) {
      State next = evaluate(stepped(cur, theta));
      if (std::isfinite(next.res) && next.res < cur.res) {
        cur = std::move(next);
        break;
      }
      if (++halvings > opt.stall_window)
        fail("NoContraction",
             "residual did not decrease after " + std::to_string(opt.stall_window) + " step halvings (now " +
                 std::to_string(cur.res) + ")",
             ErrorClass::convergence);
      theta /= 2;
    }
    out.history.push_back(cur.res);
    if (halvings == 0) theta = std::min(1.0, 2 * theta);
  }
}

double mtc_residual(const MatrixTuple& a, const MatrixTuple& q) {
  DenseMatrix acc(q[0].dim());
  for (std::size_t i = 0; i < q.size(); ++i) acc += commutator(a[i], q[i]);
  return relative_size(acc);
}

double mti_residual(const MatrixTuple& a, const MatrixTuple& q) {
  const int d = q[0].dim();
  DenseMatrix right(d), left(d);
  for (std::size_t i = 0; i < q.size(); ++i) {
    DenseMatrix qinv = mat_inverse(q[i]);
    right += a[i] * qinv;
    left += qinv * a[i];
  }
  DenseMatrix target = DenseMatrix::identity(d) * double(q.size());
  return std::max(relative_size(right - target), relative_size(left - target));
}

GSResult<DenseMatrix> o_sy_matrix(const MatrixTuple& a, const IterationOptions& opt, IterationResult* run) {
  if (a.empty()) fail("BadShape", "empty tuple", ErrorClass::input);
  const int n = static_cast<int>(a.size());
  IterationResult r = iterate_normalized(to_real(connection_sy(n)), a, opt);
  if (run) *run = r;
  return symmetric_result(a, r, false);
}

GSResult<DenseMatrix> o_fsy_matrix(const MatrixTuple& a, const IterationOptions& opt, IterationResult* run) {
  if (a.empty()) fail("BadShape", "empty tuple", ErrorClass::input);
  const int n = static_cast<int>(a.size());
  IterationResult r = iterate_omega_matrix(to_real(connection_sy(n)), a, floating_gs_chain(a), true, opt);
  if (run) *run = r;
  return symmetric_result(a, r, true);
}

IterationResult o_weighted_matrix(const std::vector<double>& weights, const MatrixTuple& a,
                                  const IterationOptions& opt) {
  if (weights.size() != a.size()) fail("BadShape", "one weight per input is needed", ErrorClass::input);
  return iterate_normalized(connection_weighted_real(weights), a, opt);
}

// ---------------------------------------------------------------------------
// anchoring

AnchoringResult gs_anchoring(const MatrixTuple& a, int r_max, double tol, int window) {
  if (a.empty()) fail("BadShape", "empty tuple", ErrorClass::input);
  if (r_max < 0 || r_max > 24) fail("BadOption", "r_max must lie in 0..24", ErrorClass::input);
  const int n = static_cast<int>(a.size());
  const MatrixTuple q = gs_chain(a);
  const RealConnection sy = to_real(connection_sy(n));
  Tuple<MatrixSeries> base, b;
  for (int i = 0; i < n; ++i) {
    base.push_back(MatrixSeries::constant(q[static_cast<std::size_t>(i)], r_max));
    b.push_back(MatrixSeries::linear(q[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(i)], r_max));
  }
  // pulled-back Step iteration; pass k fixes the t^k coefficient
  MatrixSeries left = one_like(base[0]), left_inv = left;
  for (int pass = 0; pass < r_max; ++pass) {
    MatrixSeries y = connection_apply(sy, base, tuple_sub(b, base));
    MatrixSeries e = exp_element(y), einv = exp_element(-y);
    left = left * e;
    left_inv = einv * left_inv;
    for (auto& x : b) x = einv * x * e;
  }
  AnchoringResult out;
  Tuple<MatrixSeries> series;
  for (const auto& c : base) series.push_back(left * c * left_inv);
  for (int r = 0; r <= r_max; ++r) {
    MatrixTuple term;
    for (const auto& s : series) term.push_back(s[r]);
    out.term_norms.push_back(tuple_norm(term));
    out.terms.push_back(std::move(term));
  }
  for (const auto& s : series) out.system.push_back(s.sum());
  const double scale_ref = std::max(1.0, out.term_norms[0]);
  int rising = 0;
  for (int r = 2; r <= r_max; ++r) {
    const double prev = out.term_norms[static_cast<std::size_t>(r - 1)], cur = out.term_norms[static_cast<std::size_t>(r)];
    if (cur <= tol * scale_ref) {
      rising = 0;
      continue;
    }
    rising = cur >= prev ? rising + 1 : 0;
    if (rising >= window)
      fail("DivergenceDetected", "Taylor term norms grew over " + std::to_string(window) + " consecutive orders",
           ErrorClass::convergence);
  }
  if (r_max >= 1) {
    const double last = out.term_norms.back();
    const double prev = out.term_norms[out.term_norms.size() - 2];
    const double rho = prev > 0 ? last / prev : 0.0;
    out.tail_estimate = rho < 1 ? last * rho / (1 - rho) : last;
  }
  return out;
}

// ---------------------------------------------------------------------------
// orthogonal averaging

MatrixTuple rotate_inputs(const OrthogonalMatrix& u, const MatrixTuple& a) {
  MatrixTuple out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    DenseMatrix acc(a[0].dim());
    for (std::size_t j = 0; j < a.size(); ++j)
      if (u[i][j] != 0) acc += u[i][j] * a[j];
    out.push_back(std::move(acc));
  }
  return out;
}

OrthogonalMatrix plane_rotation(int n, double theta) {
  if (n < 2) fail("BadShape", "a plane rotation needs n >= 2", ErrorClass::input);
  OrthogonalMatrix u(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) u[i][i] = 1;
  u[0][0] = std::cos(theta);
  u[0][1] = -std::sin(theta);
  u[1][0] = std::sin(theta);
  u[1][1] = std::cos(theta);
  return u;
}

std::vector<OrthogonalMatrix> orthogonal_samples(int n, int random_rotations, std::uint32_t seed) {
  if (n < 1 || n > 4) fail("BadShape", "orthogonal sampling supports n <= 4", ErrorClass::input);
  std::vector<OrthogonalMatrix> out;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (unsigned signs = 0; signs < (1u << n); ++signs) {
      OrthogonalMatrix u(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
      for (int i = 0; i < n; ++i) u[i][perm[i]] = signs & (1u << i) ? -1.0 : 1.0;
      out.push_back(std::move(u));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int s = 0; s < random_rotations; ++s) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd qm = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (r(j, j) < 0) qm.col(j) *= -1;
    if (qm.determinant() < 0) qm.col(0) *= -1;
    OrthogonalMatrix u(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) u[i][j] = qm(i, j);
    out.push_back(std::move(u));
  }
  return out;
}

AverageReport orthogonal_average_check(const MatrixOperation& method, const MatrixTuple& a,
                                       const std::vector<OrthogonalMatrix>& samples, double tol) {
  std::vector<MatrixTuple> values;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const OrthogonalMatrix& u = samples[s];
    OrthogonalMatrix ut = u;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j) ut[i][j] = u[j][i];
    try {
      values.push_back(rotate_inputs(ut, method(rotate_inputs(u, a))));
    } catch (const Error& e) {
      fail("MethodUndefined", "sample " + std::to_string(s) + ": " + e.what(), e.error_class());
    }
  }
  AverageReport rep;
  rep.samples = values.size();
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      rep.max_deviation = std::max(rep.max_deviation, tuple_distance(values[i], values[j]));
  rep.pass = rep.max_deviation <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// closed n = 2 formula

MatrixTuple closed_fsy_n2(const DenseMatrix& a1, const DenseMatrix& a2, ClosedFsyReport* report, double guard) {
  DenseMatrix a2inv, a1inv;
  try {
    a1inv = mat_inverse(a1);
    a2inv = mat_inverse(a2);
  } catch (const Error&) {
    fail("SpectralConditionViolated", "A_1 and A_2 must be invertible");
  }
  const DenseMatrix ratio = a1 * a2inv;
  SpectrumReport sp = spectrum(ratio);
  double radius = 0;
  for (const auto& z : sp.eigenvalues) radius = std::max(radius, std::abs(z));
  if (sp.min_real_axis_distance <= guard * std::max(1.0, radius))
    fail("SpectralConditionViolated", "A_1 A_2^{-1} has spectrum within " + std::to_string(sp.min_real_axis_distance) +
                                          " of the real axis; some l_1 A_1 + l_2 A_2 is singular");
  const DenseMatrix p12 = pol_matrix(ratio);
  const DenseMatrix p21 = pol_matrix(a2 * a1inv);
  MatrixTuple out{0.5 * (a1 + p12 * a2), 0.5 * (a2 + p21 * a1)};
  if (report) {
    const DenseMatrix p = pol_matrix(a1inv * a2);
    MatrixTuple alt{0.5 * (a1 - a2 * p), 0.5 * (a2 + a1 * p)};
    report->floating_residual = floating_residual(out, 1);
    report->alternative_form_deviation = tuple_distance(out, alt);
    report->mti_residual = mti_residual({a1, a2}, out);
  }
  return out;
}

double inverse_system_identity_residual(const DenseMatrix& a1, const DenseMatrix& a2, const MatrixTuple& b,
                                        int nodes) {
  if (nodes < 4) fail("BadOption", "too few quadrature nodes", ErrorClass::input);
  const DenseMatrix b1inv = mat_inverse(b[0]), b2inv = mat_inverse(b[1]);
  // the integral is linear in lambda, so two quadratures cover every (l_1, l_2)
  DenseMatrix ic(a1.dim()), is(a1.dim());
  for (int k = 0; k < nodes; ++k) {
    const double t = 2 * std::numbers::pi * k / nodes;
    const double c = std::cos(t), s = std::sin(t);
    const DenseMatrix inv = mat_inverse(c * a1 + s * a2);
    ic += c * inv;
    is += s * inv;
  }
  // mean over the circle times 2, i.e. the measure dt / pi
  ic *= 2.0 / nodes;
  is *= 2.0 / nodes;
  double worst = 0;
  for (const auto& [l1, l2] : std::vector<std::pair<double, double>>{{1, 0}, {0, 1}, {0.6, 0.8}, {-0.3, 1.1}}) {
    const DenseMatrix lhs = l1 * b1inv + l2 * b2inv;
    const DenseMatrix rhs = l1 * ic + l2 * is;
    worst = std::max(worst, frobenius_distance(lhs, rhs) / std::max(1.0, lhs.frobenius()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// weighted limit

std::vector<double> weighted_limit_probe(const std::vector<double>& weights, const MatrixTuple& a,
                                         const std::vector<double>& us, const IterationOptions& opt) {
  const MatrixTuple ordinary = o_weighted_matrix(weights, a, opt).system;
  MatrixTuple extended{DenseMatrix::identity(a[0].dim())};
  extended.insert(extended.end(), a.begin(), a.end());
  std::vector<double> out;
  for (double u : us) {
    std::vector<double> w{u};
    w.insert(w.end(), weights.begin(), weights.end());
    MatrixTuple f = iterate_omega_matrix(connection_weighted_real(w), extended, floating_gs_chain(extended), true, opt)
                        .system;
    out.push_back(tuple_distance(MatrixTuple(f.begin() + 1, f.end()), ordinary));
  }
  return out;
}

}  // namespace fqo
