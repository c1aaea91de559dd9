#include "fqortho/gram_schmidt.hpp"

#include <cmath>
#include <numbers>

namespace fqo {

namespace {

DenseMatrix dpol_fixed(const DenseMatrix& h, const DenseMatrix& e, int nodes) {
  const int d = h.dim();
  const DenseMatrix id = DenseMatrix::identity(d);
  const DenseMatrix h2 = h * h;
  const DenseMatrix heh = h * e * h;
  DenseMatrix acc(d);
  for (int k = 0; k < nodes; ++k) {
    double t = std::numbers::pi * k / nodes;
    double c2 = std::cos(t) * std::cos(t), s2 = std::sin(t) * std::sin(t);
    DenseMatrix kern;
    try {
      kern = mat_inverse(c2 * id - s2 * h2);
    } catch (const Error&) {
      fail("NodeSingular", "derivative quadrature node " + std::to_string(t) + " is singular");
    }
    acc += kern * (c2 * e + s2 * heh) * kern;
  }
  return acc * (1.0 / nodes);
}

MatrixTuple velocity(const MatrixPath& path, double t, double dt) {
  MatrixTuple p2 = path(t + 2 * dt), p1 = path(t + dt), m1 = path(t - dt), m2 = path(t - 2 * dt);
  MatrixTuple out;
  for (std::size_t i = 0; i < p1.size(); ++i)
    out.push_back((8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) * (1.0 / (12.0 * dt)));
  return out;
}

MatrixTuple checked_sample(const MatrixPath& path, double t, bool floating, double tol) {
  MatrixTuple f = path(t);
  double res = floating ? floating_residual(f, 1) : clifford_residual(f);
  if (res > tol) fail("SystemViolation", "path leaves the systems at t = " + std::to_string(t));
  return f;
}

DenseMatrix generator_at(const MatrixPath& path, double t, const TransportOptions& opt) {
  MatrixTuple f = checked_sample(path, t, false, opt.system_tol);
  return minimal_lift(f, velocity(path, t, opt.fd_step), opt.tangent_tol);
}

FPair<DenseMatrix> floating_generator_at(const MatrixPath& path, double t, const TransportOptions& opt) {
  MatrixTuple f = checked_sample(path, t, true, opt.system_tol);
  return minimal_lift_floating(f, velocity(path, t, opt.fd_step), opt.tangent_tol);
}

void check_options(const TransportOptions& opt) {
  if (opt.steps < 1) fail("BadOption", "transport needs at least one step", ErrorClass::input);
  if (!(opt.fd_step > 0)) fail("BadOption", "difference step must be positive", ErrorClass::input);
}

}  // namespace

DenseMatrix dpol(const DenseMatrix& h, const DenseMatrix& e, int nodes) {
  if (nodes > 0) return dpol_fixed(h, e, nodes);
  DenseMatrix prev = dpol_fixed(h, e, 32);
  for (int n = 64; n <= 8192; n *= 2) {
    DenseMatrix next = dpol_fixed(h, e, n);
    if (frobenius_distance(next, prev) <= 1e-13 * std::max(1.0, next.frobenius())) return next;
    prev = std::move(next);
  }
  fail("NoConvergence", "derivative quadrature did not settle", ErrorClass::convergence);
}

MatrixTuple dogs(const MatrixTuple& a, const MatrixTuple& eps) {
  if (a.size() != eps.size()) fail("MismatchedShape", "direction and base tuples differ in length");
  MatrixTuple q, dq;
  for (std::size_t k = 0; k < a.size(); ++k) {
    DenseMatrix b = a[k], db = eps[k];
    for (std::size_t h = 0; h < k; ++h) {
      const DenseMatrix& qh = q[h];
      const DenseMatrix& dqh = dq[h];
      DenseMatrix nb = 0.5 * (b + qh * b * qh);
      db = 0.5 * (db + dqh * b * qh + qh * db * qh + qh * b * dqh);
      b = std::move(nb);
    }
    q.push_back(polarize_stage(b, static_cast<int>(k) + 1));
    dq.push_back(dpol(b, db));
  }
  return dq;
}

DenseMatrix parallel_transport(const MatrixPath& path, const TransportOptions& opt) {
  check_options(opt);
  const double h = (opt.end - opt.begin) / opt.steps;
  DenseMatrix x0 = generator_at(path, opt.begin, opt);
  DenseMatrix hmat = DenseMatrix::identity(x0.dim());
  for (int s = 0; s < opt.steps; ++s) {
    double t = opt.begin + s * h;
    DenseMatrix xm = generator_at(path, t + 0.5 * h, opt);
    DenseMatrix x1 = generator_at(path, t + h, opt);
    DenseMatrix k1 = x0 * hmat;
    DenseMatrix k2 = xm * (hmat + (0.5 * h) * k1);
    DenseMatrix k3 = xm * (hmat + (0.5 * h) * k2);
    DenseMatrix k4 = x1 * (hmat + h * k3);
    hmat += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x0 = std::move(x1);
  }
  return hmat;
}

FPair<DenseMatrix> parallel_transport_floating(const MatrixPath& path, const TransportOptions& opt) {
  check_options(opt);
  const double h = (opt.end - opt.begin) / opt.steps;
  FPair<DenseMatrix> x0 = floating_generator_at(path, opt.begin, opt);
  const int d = x0.left.dim();
  DenseMatrix l = DenseMatrix::identity(d), r = DenseMatrix::identity(d);
  for (int s = 0; s < opt.steps; ++s) {
    double t = opt.begin + s * h;
    FPair<DenseMatrix> xm = floating_generator_at(path, t + 0.5 * h, opt);
    FPair<DenseMatrix> x1 = floating_generator_at(path, t + h, opt);
    // L' = X_left L, R' = R X_right
    DenseMatrix kl1 = x0.left * l, kr1 = r * x0.right;
    DenseMatrix kl2 = xm.left * (l + (0.5 * h) * kl1), kr2 = (r + (0.5 * h) * kr1) * xm.right;
    DenseMatrix kl3 = xm.left * (l + (0.5 * h) * kl2), kr3 = (r + (0.5 * h) * kr2) * xm.right;
    DenseMatrix kl4 = x1.left * (l + h * kl3), kr4 = (r + h * kr3) * x1.right;
    l += (h / 6.0) * (kl1 + 2.0 * kl2 + 2.0 * kl3 + kl4);
    r += (h / 6.0) * (kr1 + 2.0 * kr2 + 2.0 * kr3 + kr4);
    x0 = std::move(x1);
  }
  return {l, r};
}

DenseMatrix pt_gs(const MatrixTuple& r, const MatrixTuple& q, int steps) {
  require_clifford(q, 1e-8);
  require_clifford(r, 1e-8);
  MatrixPath path = [&](double t) {
    MatrixTuple mix;
    for (std::size_t i = 0; i < q.size(); ++i) mix.push_back((1.0 - t) * q[i] + t * r[i]);
    return gs_chain(mix);
  };
  TransportOptions opt;
  opt.steps = steps;
  return parallel_transport(path, opt);
}

FPair<DenseMatrix> pt_fgs(const MatrixTuple& r, const MatrixTuple& q, int steps) {
  require_floating(q, 1e-8);
  require_floating(r, 1e-8);
  MatrixPath path = [&](double t) {
    MatrixTuple mix;
    for (std::size_t i = 0; i < q.size(); ++i) mix.push_back((1.0 - t) * q[i] + t * r[i]);
    return floating_gs_chain(mix);
  };
  TransportOptions opt;
  opt.steps = steps;
  return parallel_transport_floating(path, opt);
}

}  // namespace fqo
