#include "fqortho/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <bit>

namespace fqo {

ConnectionData connection_gs(int n) {
  ConnectionData c(n, "gs", Rational(0));
  for (unsigned iota = 1; iota < (1u << n); ++iota) c.set(std::countr_zero(iota) + 1, iota, Rational(1));
  return c;
}

ConnectionData connection_sy(int n) {
  ConnectionData c(n, "sy", Rational(0));
  for (unsigned iota = 1; iota < (1u << n); ++iota)
    for (int j = 1; j <= n; ++j)
      if (iota & (1u << (j - 1))) c.set(j, iota, rat(1, std::popcount(iota)));
  return c;
}

ConnectionData connection_weighted(const std::vector<Rational>& w) {
  const int n = static_cast<int>(w.size());
  for (const auto& v : w)
    if (sgn(v) <= 0) fail("NonPositiveWeight", "weights must be strictly positive", ErrorClass::input);
  ConnectionData c(n, "weighted", Rational(0));
  for (unsigned iota = 1; iota < (1u << n); ++iota) {
    Rational total(0);
    for (int h = 1; h <= n; ++h)
      if (iota & (1u << (h - 1))) total += w[h - 1];
    for (int j = 1; j <= n; ++j)
      if (iota & (1u << (j - 1))) c.set(j, iota, w[j - 1] / total);
  }
  return c;
}

RealConnection connection_weighted_real(const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  for (double v : w)
    if (!(v > 0)) fail("NonPositiveWeight", "weights must be strictly positive", ErrorClass::input);
  RealConnection c(n, "weighted", 0.0);
  for (unsigned iota = 1; iota < (1u << n); ++iota) {
    double total = 0;
    for (int h = 1; h <= n; ++h)
      if (iota & (1u << (h - 1))) total += w[h - 1];
    for (int j = 1; j <= n; ++j)
      if (iota & (1u << (j - 1))) c.set(j, iota, w[j - 1] / total);
  }
  return c;
}

SeriesConnection connection_gs_series(int n, int torder) {
  SeriesConnection c(n, "gs(t)", TPoly(torder));
  const TPoly t = TPoly::variable(torder);
  auto power = [&](int e) {
    TPoly p(Rational(1), torder);
    for (int i = 0; i < e; ++i) p *= t;
    return p;
  };
  for (unsigned iota = 1; iota < (1u << n); ++iota) {
    const int lead = std::countr_zero(iota) + 1;
    TPoly total(torder);
    for (int h = lead; h <= n; ++h)
      if (iota & (1u << (h - 1))) total += power(h - lead);
    TPoly inv = total.inverse();
    for (int j = lead; j <= n; ++j)
      if (iota & (1u << (j - 1))) c.set(j, iota, power(j - lead) * inv);
  }
  return c;
}

ConnectionData connection_gs_at(int n, const Rational& t) {
  if (sgn(t) == 0) return connection_gs(n);
  std::vector<Rational> w;
  Rational p(1);
  for (int j = 0; j < n; ++j) {
    w.push_back(p);
    p *= t;
  }
  ConnectionData c = connection_weighted(w);
  return c;
}

RealConnection to_real(const ConnectionData& c) {
  return c.convert<double>([](const Rational& v) { return to_double(v); });
}

EtaReduction reduce_eta(const std::vector<std::vector<double>>& eta) {
  const int n = static_cast<int>(eta.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(eta[i].size()) != n) fail("EtaNotSPD", "eta must be square", ErrorClass::input);
    for (int j = 0; j < n; ++j) m(i, j) = eta[i][j];
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    fail("EtaNotSPD", "eta must be symmetric", ErrorClass::input);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  EtaReduction red;
  for (int a = 0; a < n; ++a) {
    double lambda = es.eigenvalues()(a);
    if (!(lambda > 0)) fail("EtaNotSPD", "eta must be positive definite", ErrorClass::input);
    red.weights.push_back(lambda);
    std::vector<double> row(n);
    for (int j = 0; j < n; ++j) row[j] = es.eigenvectors()(j, a);
    red.rotation.push_back(row);
  }
  return red;
}

ExactEtaReduction reduce_eta_exact(const std::vector<std::vector<Rational>>& eta) {
  const int n = static_cast<int>(eta.size());
  bool diagonal = true;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(eta[i].size()) != n) fail("EtaNotSPD", "eta must be square", ErrorClass::input);
    for (int j = 0; j < n; ++j) {
      if (eta[i][j] != eta[j][i]) fail("EtaNotSPD", "eta must be symmetric", ErrorClass::input);
      if (i != j && sgn(eta[i][j]) != 0) diagonal = false;
    }
  }
  ExactEtaReduction red;
  if (diagonal) {
    for (int i = 0; i < n; ++i) {
      if (sgn(eta[i][i]) <= 0) fail("EtaNotSPD", "eta must be positive definite", ErrorClass::input);
      red.weights.push_back(eta[i][i]);
      std::vector<Rational> row(n, Rational(0));
      row[i] = 1;
      red.rotation.push_back(row);
    }
    return red;
  }
  if (n != 2) fail("EtaNotRationallyDiagonalizable", "exact eta reduction supports diagonal eta or n = 2");
  const Rational a = eta[0][0], b = eta[0][1], c = eta[1][1];
  if (sgn(a) <= 0 || sgn(a * c - b * b) <= 0) fail("EtaNotSPD", "eta must be positive definite", ErrorClass::input);
  Rational disc = (a - c) * (a - c) + 4 * b * b, root;
  if (!exact_sqrt(disc, root)) fail("EtaNotRationallyDiagonalizable", "eigenvalues of eta are irrational");
  for (int sign : {-1, 1}) {
    Rational lambda = (a + c + sign * root) / 2;
    Rational vx = b, vy = lambda - a, len;
    if (!exact_sqrt(vx * vx + vy * vy, len)) fail("EtaNotRationallyDiagonalizable", "eigenvectors of eta have irrational length");
    red.weights.push_back(lambda);
    red.rotation.push_back({Rational(vx / len), Rational(vy / len)});
  }
  return red;
}

}  // namespace fqo
