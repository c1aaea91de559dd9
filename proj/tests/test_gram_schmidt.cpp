#include <doctest.h>

#include <cmath>
#include <random>

#include "fqortho/gram_schmidt.hpp"
#include "support.hpp"

using namespace fqo;
using namespace testsupport;

namespace {

DenseMatrix embed(const MatrixTuple& units, const std::vector<double>& v) {
  DenseMatrix m = DenseMatrix::zero(units[0].dim());
  for (std::size_t i = 0; i < v.size(); ++i) m += v[i] * units[i];
  return m;
}

std::vector<std::vector<double>> classical_gs(std::vector<std::vector<double>> v) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    for (std::size_t h = 0; h < k; ++h) {
      double dot = 0;
      for (std::size_t m = 0; m < v[k].size(); ++m) dot += v[k][m] * v[h][m];
      for (std::size_t m = 0; m < v[k].size(); ++m) v[k][m] -= dot * v[h][m];
    }
    double len = 0;
    for (double x : v[k]) len += x * x;
    len = std::sqrt(len);
    for (double& x : v[k]) x /= len;
  }
  return v;
}

MatrixTuple perturbed(std::mt19937& rng, const MatrixTuple& q, double size) {
  return tuple_add(q, random_tuple(rng, static_cast<int>(q.size()), q[0].dim(), size));
}

MatrixTuple mix(const MatrixTuple& a, const MatrixTuple& b, double t) {
  MatrixTuple out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(t * a[i] + (1 - t) * b[i]);
  return out;
}

}  // namespace

TEST_CASE("ogs fixes Clifford systems and normalizes scalings") {
  std::mt19937 rng(11);
  MatrixTuple q = random_clifford(rng, 2);
  CHECK(tuple_distance(ogs(q).system, q) < 1e-10);
  MatrixTuple j = clifford_matrices(1);
  CHECK(tuple_distance(ogs(MatrixTuple{3.0 * j[0]}).system, j) < 1e-12);

  auto base = formal_base(2, 3);
  CHECK(ogs(base).system == base);
}

TEST_CASE("ogs reduces to classical Gram-Schmidt on embedded vectors") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  MatrixTuple units = quaternion_units();
  {
    auto out = ogs(MatrixTuple{embed(units, {1, 0}), embed(units, {1, 1})}).system;
    auto e = classical_gs({{1, 0}, {1, 1}});
    CHECK(frobenius_distance(out[0], embed(units, e[0])) < 1e-12);
    CHECK(frobenius_distance(out[1], embed(units, e[1])) < 1e-12);
  }
  for (int dim = 2; dim <= 3; ++dim)
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::vector<double>> v(dim, std::vector<double>(dim));
      for (auto& row : v)
        for (double& x : row) x = g(rng);
      MatrixTuple a;
      for (const auto& row : v) a.push_back(embed(units, row));
      auto e = classical_gs(v);
      MatrixTuple want;
      for (const auto& row : e) want.push_back(embed(units, row));
      CHECK(tuple_distance(ogs(a).system, want) < 1e-8);
    }
}

TEST_CASE("ogs output satisfies the characterization and violations are detected") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixTuple a = perturbed(rng, random_clifford(rng, 3), 0.4);
    auto res = ogs(a);
    auto rep = check_gs_characterization(a, res.system, false);
    CHECK(rep.all());
    CHECK(res.cp_residual < 1e-10);
    CHECK(res.lgs_residual < 1e-10);
    CHECK(res.nsp_margin > 0);

    auto flipped = check_gs_characterization(a, tuple_scale(res.system, -1.0), false);
    CHECK(flipped.cp);
    CHECK(flipped.lgs);
    CHECK_FALSE(flipped.nsp);

    auto other = check_gs_characterization(a, random_clifford(rng, 3), false);
    CHECK_FALSE(other.lgs);

    MatrixTuple broken = res.system;
    broken[1] = 1.1 * broken[1];
    auto off = check_gs_characterization(a, broken, false);
    CHECK_FALSE(off.cp);
    CHECK_FALSE(off.lgs);
  }
}

TEST_CASE("ogs sign linearity, parabolic invariance, filtration and fiber stability") {
  std::mt19937 rng(3);
  MatrixTuple a = perturbed(rng, random_clifford(rng, 2), 0.3);
  MatrixTuple q = ogs(a).system;
  for (unsigned signs = 0; signs < 4; ++signs) {
    MatrixTuple b = a, want = q;
    for (int i = 0; i < 2; ++i)
      if (signs & (1u << i)) {
        b[i] = -b[i];
        want[i] = -want[i];
      }
    CHECK(tuple_distance(ogs(b).system, want) < 1e-10);
  }
  MatrixTuple par = a;
  par[1] = 0.7 * a[0] + 2.5 * a[1];
  CHECK(tuple_distance(ogs(par).system, q) < 1e-10);

  MatrixTuple changed = a;
  changed[1] = changed[1] + random_matrix(rng, 4, 0.2);
  MatrixTuple qc = ogs(changed).system;
  CHECK(frobenius_distance(q[0], qc[0]) == 0);
  CHECK(frobenius_distance(q[1], qc[1]) > 1e-6);

  for (double t : {0.25, 0.5, 0.75}) CHECK(tuple_distance(ogs(mix(a, q, t)).system, q) < 1e-10);
}

TEST_CASE("ogs stays defined under perturbations below the spectral margin") {
  std::mt19937 rng(13);
  MatrixTuple a = perturbed(rng, random_clifford(rng, 2), 0.3);
  auto res = ogs(a);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixTuple b = perturbed(rng, a, 0.2 * res.nsp_margin);
    CHECK_NOTHROW(ogs(b));
  }
}

TEST_CASE("ogs reports the failing polarization stage") {
  MatrixTuple j = clifford_matrices(2);
  MatrixTuple bad{j[0], j[0]};  // the second input has no part anticommuting with Q_1
  try {
    ogs(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "PolarizationDomain");
    CHECK(std::string(e.what()).find("stage 2") != std::string::npos);
  }
}

TEST_CASE("formal ogs is an exact Clifford system with vanishing GS connection") {
  std::mt19937 rng(17);
  auto base = formal_base(2, 3);
  auto a = tuple_add(base, random_formal_tuple(rng, 2, 3, 1, 2, 4));
  auto res = ogs(a);
  CHECK(res.cp_residual == 0);
  CHECK(res.lgs_residual == 0);
  CHECK(res.nsp_margin > 0);
  auto g = generic_input<Rational>(2, 2);
  auto rg = ogs(g);
  CHECK(rg.cp_residual == 0);
  CHECK(rg.lgs_residual == 0);
}

TEST_CASE("ofgs: fixed points, trivial n = 1 case and bivariance") {
  std::mt19937 rng(19);
  MatrixTuple q = random_clifford(rng, 2);
  DenseMatrix l = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.4);
  DenseMatrix r = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.4);
  MatrixTuple fq = Ad_f(FPair<DenseMatrix>{l, r}, q);
  CHECK(floating_residual(fq, 1) < 1e-10);
  CHECK(tuple_distance(ofgs(fq).system, fq) < 1e-9);

  DenseMatrix single = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.5);
  CHECK(tuple_distance(ofgs(MatrixTuple{single}).system, MatrixTuple{single}) == 0);

  MatrixTuple a = tuple_add(fq, random_tuple(rng, 2, 4, 0.3));
  auto res = ofgs(a);
  CHECK(frobenius_distance(res.system[0], a[0]) == 0);
  CHECK(check_gs_characterization(a, res.system, true).all());
  DenseMatrix t1 = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.5);
  DenseMatrix t2 = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.5);
  FPair<DenseMatrix> theta{t1, t2};
  CHECK(tuple_distance(ofgs(Ad_f(theta, a)).system, Ad_f(theta, res.system)) < 1e-8);

  CHECK_THROWS_AS(ofgs(MatrixTuple{DenseMatrix::zero(4), q[1]}), Error);
}

TEST_CASE("dpol and dogs match finite differences and the derivative identities") {
  std::mt19937 rng(23);
  MatrixTuple a = perturbed(rng, random_clifford(rng, 2), 0.3);
  MatrixTuple q = ogs(a).system;
  MatrixTuple eps = random_tuple(rng, 2, 4, 1.0);

  DenseMatrix e = random_matrix(rng, 4, 1.0);
  const double h = 1e-4;
  DenseMatrix fd = (pol_matrix(a[0] + h * e) - pol_matrix(a[0] - h * e)) * (0.5 / h);
  CHECK(frobenius_distance(dpol(a[0], e), fd) < 1e-6);

  MatrixTuple zero = tuple_scale(eps, 0.0);
  CHECK(tuple_norm(dogs(a, zero)) == 0);

  MatrixTuple d = dogs(a, eps);
  MatrixTuple fdt = tuple_scale(tuple_sub(ogs(tuple_add(a, tuple_scale(eps, h))).system,
                                          ogs(tuple_sub(a, tuple_scale(eps, h))).system),
                                0.5 / h);
  CHECK(tuple_distance(d, fdt) < 1e-6);

  // linearity
  MatrixTuple eps2 = random_tuple(rng, 2, 4, 1.0);
  CHECK(tuple_distance(dogs(a, tuple_add(eps, tuple_scale(eps2, 2.0))),
                       tuple_add(d, tuple_scale(dogs(a, eps2), 2.0))) < 1e-9);

  // conjugation directions
  DenseMatrix x = random_matrix(rng, 4, 1.0);
  CHECK(tuple_distance(dogs(a, ad(x, a)), ad(x, q)) < 1e-9);

  // only the GS-connection part of the direction matters
  DenseMatrix g = connection_apply(connection_gs(2), q, eps);
  CHECK(tuple_distance(dogs(a, eps), dogs(a, ad(g, q))) < 1e-8);
}

TEST_CASE("minimal lift inverts the infinitesimal action") {
  std::mt19937 rng(29);
  MatrixTuple q = random_clifford(rng, 3);
  DenseMatrix x = random_matrix(rng, 4, 1.0);
  DenseMatrix xn = tangent_normalize(x, q);
  CHECK(frobenius_distance(minimal_lift(q, ad(x, q)), xn) < 1e-9);
  CHECK(minimal_lift(q, tuple_scale(q, 0.0)).frobenius() == 0);
  MatrixTuple r = ad(random_matrix(rng, 4, 1.0), q);
  CHECK(tuple_distance(ad(minimal_lift(q, r), q), r) < 1e-9);
  CHECK_THROWS_AS(minimal_lift(q, random_tuple(rng, 3, 4, 1.0)), Error);

  auto base = formal_base(2, 3);
  FormalElement y = random_formal(rng, 2, 3, 1, 2, 5);
  CHECK(ad(minimal_lift(base, ad(y, base)), base) == ad(y, base));

  MatrixTuple fq = Ad_f(FPair<DenseMatrix>{DenseMatrix::identity(4) + random_matrix(rng, 4, 0.3),
                                           DenseMatrix::identity(4) + random_matrix(rng, 4, 0.3)},
                        q);
  FPair<DenseMatrix> p{random_matrix(rng, 4, 1.0), random_matrix(rng, 4, 1.0)};
  MatrixTuple fr = ad_f(p, fq);
  CHECK(tuple_distance(ad_f(minimal_lift_floating(fq, fr), fq), fr) < 1e-9);
}

TEST_CASE("parallel transport along conjugation paths") {
  std::mt19937 rng(31);
  MatrixTuple q = random_clifford(rng, 2);
  DenseMatrix x = tangent_normalize(random_matrix(rng, 4, 1.0), q);

  DenseMatrix id = parallel_transport([&](double) { return q; });
  CHECK(frobenius_distance(id, DenseMatrix::identity(4)) < 1e-12);

  MatrixPath path = [&](double t) { return Ad(expm(t * x), q); };
  DenseMatrix hm = parallel_transport(path);
  CHECK(frobenius_distance(hm, expm(x)) < 1e-8);
  CHECK(tuple_distance(Ad(hm, q), path(1.0)) < 1e-8);

  FPair<DenseMatrix> fh = parallel_transport_floating(path);
  CHECK(frobenius_distance(fh.left, hm) < 1e-8);
  CHECK(frobenius_distance(fh.right, mat_inverse(hm)) < 1e-8);

  CHECK_THROWS_AS(parallel_transport([&](double t) { return tuple_scale(q, 1.0 + t); }), Error);
}

TEST_CASE("Gram-Schmidt transport conjugates nearby systems") {
  std::mt19937 rng(37);
  MatrixTuple q = random_clifford(rng, 3);
  CHECK(frobenius_distance(pt_gs(q, q), DenseMatrix::identity(4)) < 1e-12);
  for (int trial = 0; trial < 3; ++trial) {
    MatrixTuple r = Ad(expm(random_matrix(rng, 4, 0.3)), q);
    DenseMatrix h = pt_gs(r, q);
    CHECK(tuple_distance(Ad(h, q), r) < 1e-7);
  }
  MatrixTuple fq = Ad_f(FPair<DenseMatrix>{DenseMatrix::identity(4) + random_matrix(rng, 4, 0.3),
                                           DenseMatrix::identity(4) + random_matrix(rng, 4, 0.3)},
                        clifford_matrices(2));
  for (int trial = 0; trial < 3; ++trial) {
    FPair<DenseMatrix> move{expm(random_matrix(rng, 4, 0.2)), expm(random_matrix(rng, 4, 0.2))};
    MatrixTuple fr = Ad_f(move, fq);
    FPair<DenseMatrix> h = pt_fgs(fr, fq);
    CHECK(tuple_distance(Ad_f(h, fq), fr) < 1e-7);
  }
}
