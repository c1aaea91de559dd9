#include <doctest.h>

#include <random>

#include "fqortho/omega.hpp"
#include "support.hpp"

using namespace fqo;
using namespace testsupport;

namespace {

bool equal_tuples(const Tuple<FormalElement>& x, const Tuple<FormalElement>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] - y[i]).is_zero()) return false;
  return true;
}

FormalElement clifford_unit(int n, int cap, const std::vector<std::pair<unsigned, Rational>>& parts) {
  FormalElement x(n, cap);
  for (const auto& [k, c] : parts) x += scale(FormalElement::blade(n, cap, k), c);
  return x;
}

// theta_1 (Q + R) theta_2 with degree-0 theta's: a floating-based generic input.
Tuple<FormalElement> floating_input(int n, int cap) {
  auto a = generic_input<Rational>(n, cap);
  FormalElement u = clifford_unit(n, cap, {{0, rat(1)}, {1, rat(1, 2)}});
  FormalElement v = clifford_unit(n, cap, {{0, rat(2)}, {(1u << n) - 1, rat(-1, 3)}});
  for (auto& x : a) x = u * x * v;
  return a;
}

}  // namespace

TEST_CASE("the Step iteration with the GS connection reproduces the recursive GS chain") {
  for (int n : {1, 2, 3}) {
    auto a = generic_input<Rational>(n, 2);
    OmegaRun run;
    CHECK(equal_tuples(o_omega(connection_gs(n), a, false, &run), gs_chain(a)));
    CHECK(run.iterations <= 2);
  }
}

TEST_CASE("each Step gains one letter degree and the iteration lands on the pulled-back fixed point") {
  const int n = 2, cap = 3;
  auto a = generic_input<Rational>(n, cap);
  ConnectionData sy = connection_sy(n);
  Tuple<FormalElement> q = formal_base(n, cap);
  for (int k = 0; k <= cap; ++k) {
    CHECK(connection_apply(sy, q, tuple_sub(a, q)).min_degree() >= k + 1);
    q = omega_step(sy, a, q);
  }
  CHECK(equal_tuples(q, o_omega(sy, a)));
  CHECK(clifford_residual(q) == 0);
  CHECK(connection_apply(sy, q, a).is_zero());
}

TEST_CASE("floating Step iteration: fixed point, pull-back equivalence, GS case") {
  const int n = 2, cap = 2;
  auto a = floating_input(n, cap);
  ConnectionData sy = connection_sy(n);
  Tuple<FormalElement> base;
  for (const auto& x : a) base.push_back(x.degree_part(0));
  Tuple<FormalElement> q = base;
  for (int k = 0; k <= cap + 1; ++k) q = omega_step_floating(sy, a, q);
  Tuple<FormalElement> fixed = o_omega(sy, a, true);
  CHECK(equal_tuples(q, fixed));
  CHECK(floating_residual(fixed, 1) == 0);
  FPair<FormalElement> p = fpair_sub(connection_apply_floating(sy, fixed, a), half_unit_pair(fixed[0]));
  CHECK(p.left.is_zero());
  CHECK(p.right.is_zero());
  CHECK(equal_tuples(o_omega(connection_gs(n), a, true), floating_gs_chain(a)));
}

TEST_CASE("coefficient tables of GS and of the symmetric orthogonalization match the reference tables") {
  RationalTable gs = extract_omega_tables<Rational>(connection_gs(2), 2, 2);
  // independent route: the recursive chain, no Step iteration
  CHECK(gs == extract_coeff_table(gs_chain(generic_input<Rational>(2, 2)), 2));
  TableDiff dg = compare_tables(p_matrices(gs), reference_tables("gs"));
  CHECK(dg.compared == 2 + 16 + 128);
  CHECK(dg.mismatched == 0);
  RationalTable sy = extract_omega_tables<Rational>(connection_sy(2), 2, 2);
  TableDiff ds = compare_tables(p_matrices(sy), reference_tables("sy"));
  for (const auto& d : ds.details) MESSAGE(d);
  CHECK(ds.mismatched == 0);
  CHECK(gs.kappa_free());
  CHECK(sy.kappa_free());
}

TEST_CASE("GS(t) tables at rational t match the interpolating family, with the two corrected entries") {
  for (const Rational& t : {rat(1, 2), rat(2), rat(1, 3), rat(3), rat(0), rat(1)}) {
    RationalTable tab = extract_omega_tables<Rational>(connection_gs_at(2, t == 0 ? rat(1) : t), 2, 2);
    if (t == 0) tab = extract_omega_tables<Rational>(connection_gs(2), 2, 2);
    PMatrices got = p_matrices(tab);
    TableDiff d = compare_tables(got, reference_tables("gst", t));
    for (const auto& s : d.details) MESSAGE(s);
    CHECK(d.mismatched == 0);
    const Rational u = Rational(1) / (1 + t);
    // entries (4,8) and (3,8) of the first level-2 matrix
    CHECK(got.p2[0][3][7] == rat(1, 2) * t * u * u);
    CHECK(got.p2[0][2][7] == rat(1, 2) * t * u);
  }
  CHECK(reference_tables("gst", rat(1)).p2 == reference_tables("sy").p2);
  CHECK(reference_tables("gst", rat(0)).p2 == reference_tables("gs").p2);
}

TEST_CASE("series route of the GS(t) tables agrees with the rational-t route after resummation") {
  SeriesTable series = extract_omega_tables<TPoly>(connection_gs_series(2, 5), 2, 2, false, 5);
  for (const Rational& t0 : {rat(1, 2), rat(1), rat(3)}) {
    RationalTable exact = extract_omega_tables<Rational>(connection_gs_at(2, t0), 2, 2);
    bool certified = true;
    RationalTable summed = series.map<Rational>([&](const TPoly& f) {
      Rational v;
      certified = certified && resum_at(f, t0, v);
      return v;
    });
    CHECK(certified);
    CHECK(summed == exact);
  }
  // t^0 coefficients are the GS table
  CHECK(series.map<Rational>([](const TPoly& f) { return f[0]; }) ==
        extract_omega_tables<Rational>(connection_gs(2), 2, 2));
}

TEST_CASE("resummation refuses series whose u-expansion does not terminate") {
  TPoly f(4);
  for (int k = 0; k <= 4; ++k) f.at(k) = 1;  // 1 / (1 - t)
  Rational v;
  CHECK_FALSE(resum_at(f, rat(1, 2), v));
  TPoly g(4);  // 1 / (1 + t) = 1 - u
  for (int k = 0; k <= 4; ++k) g.at(k) = k % 2 ? -1 : 1;
  REQUIRE(resum_at(g, rat(1, 3), v));
  CHECK(v == rat(3, 4));
}

TEST_CASE("index symmetry between the two outputs of GS(t) under t -> 1/t") {
  CHECK(varpi_letter(0) == 4);
  CHECK(varpi_letter(1) == 6);
  CHECK(varpi_letter(2) == 5);
  CHECK(varpi_letter(3) == 7);
  for (int l = 0; l < 8; ++l) CHECK(varpi_letter(varpi_letter(l)) == l);
  for (const Rational& t : {rat(1, 2), rat(3), rat(1)}) {
    RationalTable at = extract_omega_tables<Rational>(connection_gs_at(2, t), 2, 3);
    RationalTable inv = extract_omega_tables<Rational>(connection_gs_at(2, Rational(1) / t), 2, 3);
    CHECK(varpi_symmetry_check(at, inv));
  }
  RationalTable half = extract_omega_tables<Rational>(connection_gs_at(2, rat(1, 2)), 2, 2);
  CHECK_FALSE(varpi_symmetry_check(half, half));
}

TEST_CASE("cost guard on table extraction") {
  CHECK_THROWS_WITH_AS(extract_omega_tables<Rational>(connection_gs(4), 4, 1), doctest::Contains("n <= 3"), Error);
  CHECK_THROWS_AS(extract_omega_tables<Rational>(connection_gs(2), 2, 4), Error);
}

TEST_CASE("free coefficient data evaluated in the GS gauge") {
  const int n = 2, cap = 2;
  auto a = generic_input<Rational>(n, cap);
  CHECK(equal_tuples(custom_fq_eval(OperationData::unit(n), a), gs_chain(a)));
  // the admissible part of the symmetric table regenerates the whole operation
  RationalTable sy = extract_omega_tables<Rational>(connection_sy(n), n, cap);
  OperationData data = OperationData::from_table(sy);
  CHECK(data.coeffs.size() < sy.entries[0].size() + sy.entries[1].size());
  CHECK(equal_tuples(custom_fq_eval(data, a), o_omega(connection_sy(n), a)));
  // and on a random input around a conjugated base
  std::mt19937 rng(7);
  FormalElement g = clifford_unit(n, cap, {{0, rat(1)}, {1, rat(1, 2)}, {3, rat(-2, 3)}});
  Tuple<FormalElement> c = tuple_add(Ad(g, formal_base(n, cap)), random_formal_tuple(rng, n, cap, 1, 2, 4));
  CHECK(equal_tuples(custom_fq_eval(data, c), o_omega(connection_sy(n), c)));
  // GS gauge: the excluded components vanish
  Tuple<FormalElement> q = gs_chain(a);
  auto d = decompose(tuple_sub(a, q), q, false);
  for (int l = 0; l < letter_count(n); ++l)
    if (!gs_admissible_letter(n, l))
      CHECK(d.right[letter_generator(n, l) - 1][letter_iota(n, l)].is_zero());
  OperationData bad;
  bad.n = n;
  CHECK_THROWS_WITH_AS(bad.set(1, {2}, 0, rat(1)), doctest::Contains("GS gauge"), Error);
}

TEST_CASE("orthogonalization data: exponents act by conjugation on the GS system") {
  const int n = 2, cap = 2;
  auto a = generic_input<Rational>(n, cap);
  OrthogonalizationData p;
  p.n = n;
  CHECK(equal_tuples(custom_orth_eval(p, a), gs_chain(a)));
  p.set({1}, rat(3, 2));
  p.set({1, 4}, rat(-1, 2));
  Tuple<FormalElement> out = custom_orth_eval(p, a);
  CHECK(clifford_residual(out) == 0);
  Tuple<FormalElement> q = gs_chain(a);
  auto d = decompose(tuple_sub(a, q), q, false);
  FormalElement e1 = scale(d.right[0][letter_iota(n, 1)], rat(3, 2));
  FormalElement e2 = scale(d.right[0][letter_iota(n, 1)] * d.right[1][letter_iota(n, 4)], rat(-1, 2));
  CHECK(equal_tuples(out, Ad(exp_formal(e1), Ad(exp_formal(e2), q))));
  CHECK_THROWS_WITH_AS(p.set({0}, rat(1)), doctest::Contains("sum to zero"), Error);
  CHECK_THROWS_AS(p.set({}, rat(1)), Error);
}

TEST_CASE("coefficient counts: closed forms agree with enumeration") {
  CHECK(coeff_count(2, 1, CountKind::fq_op_vl) == 10);
  CHECK(coeff_count(2, 1, CountKind::fq_orth) == 3);
  CHECK(coeff_count(2, 2, CountKind::conform_orth) == 1);
  for (auto kind : {CountKind::fq_op, CountKind::fq_op_vl, CountKind::fq_orth, CountKind::conform_op,
                    CountKind::conform_op_vl, CountKind::conform_orth})
    for (int n = 1; n <= 5; ++n)
      for (int r = 0; r <= 4; ++r) {
        CAPTURE(count_kind_name(kind));
        CAPTURE(n);
        CAPTURE(r);
        CHECK(coeff_count(n, r, kind) == coeff_count_enumerated(n, r, kind));
      }
  CHECK(parse_count_kind("conform-op-vl") == CountKind::conform_op_vl);
  CHECK_THROWS_AS(parse_count_kind("nope"), Error);
}

TEST_CASE("admissible letter tables match the data accepted by the evaluator") {
  for (int n = 1; n <= 3; ++n) {
    int admissible = 0;
    for (int l = 0; l < letter_count(n); ++l) admissible += gs_admissible_letter(n, l);
    CHECK(admissible * n == coeff_count(n, 1, CountKind::fq_op_vl));
  }
}

TEST_CASE("conform extension by ratio reduction") {
  const int n = 2, cap = 2;
  FormalOperation fgs = [](const Tuple<FormalElement>& x) { return floating_gs_chain(x); };
  FormalOperation fsy = [](const Tuple<FormalElement>& x) { return o_omega(connection_sy(2), x, true); };
  FormalOperation gs = [](const Tuple<FormalElement>& x) { return gs_chain(x); };
  auto a = floating_input(n, cap);
  CHECK(equal_tuples(conform_extend(fgs, a), floating_gs_chain(a)));
  CHECK(equal_tuples(conform_extend(fsy, a), o_omega(connection_sy(n), a, true)));
  Tuple<FormalElement> exact = formal_base(n, cap);
  CHECK(equal_tuples(conform_extend(gs, exact), exact));
  // bivariance
  std::mt19937 rng(3);
  FormalElement t1 = one_like(a[0]) + random_formal(rng, n, cap, 1, 2, 3);
  FormalElement t2 = one_like(a[0]) + random_formal(rng, n, cap, 1, 2, 3);
  Tuple<FormalElement> moved;
  for (const auto& x : a) moved.push_back(t1 * x * t2);
  Tuple<FormalElement> lhs = conform_extend(fsy, moved);
  Tuple<FormalElement> rhs;
  for (const auto& x : conform_extend(fsy, a)) rhs.push_back(t1 * x * t2);
  CHECK(equal_tuples(lhs, rhs));
  // right rotation by a unit anticommuting with all Q_i
  FormalElement h = FormalElement::blade(n, cap, 3);
  FormalElement rot = scale(one_like(h), rat(3, 5)) + scale(h, rat(4, 5));
  auto g = generic_input<Rational>(n, cap);
  Tuple<FormalElement> turned;
  for (const auto& x : g) turned.push_back(x * rot);
  Tuple<FormalElement> expect;
  for (const auto& x : conform_extend(fsy, g)) expect.push_back(x * rot);
  CHECK(equal_tuples(conform_extend(fsy, turned), expect));
}

TEST_CASE("conform extension: block construction agrees with the ratio reduction") {
  std::mt19937 rng(11);
  MatrixOperation fgs = [](const MatrixTuple& x) { return floating_gs_chain(x); };
  for (int trial = 0; trial < 5; ++trial) {
    MatrixTuple q = clifford_matrices(2);
    DenseMatrix l = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.3);
    DenseMatrix r = DenseMatrix::identity(4) + random_matrix(rng, 4, 0.3);
    MatrixTuple a = tuple_add(Ad_f(FPair<DenseMatrix>{l, r}, q), random_tuple(rng, 2, 4, 0.1));
    CHECK(tuple_distance(conform_extend_block(fgs, a), floating_gs_chain(a)) < 1e-9);
    CHECK(tuple_distance(conform_extend_block(fgs, a, 2), floating_gs_chain(a)) < 1e-9);
  }
}

TEST_CASE("structural properties separate GS, the symmetric orthogonalization and GS(1/2)") {
  FormalOperation gs = [](const Tuple<FormalElement>& x) { return gs_chain(x); };
  FormalOperation sy = [](const Tuple<FormalElement>& x) { return o_omega(connection_sy(2), x); };
  FormalOperation half = [](const Tuple<FormalElement>& x) { return o_omega(connection_gs_at(2, rat(1, 2)), x); };
  PropertyReport g = property_checks(gs, 2, 2);
  CHECK(g.fst);
  CHECK(g.fil);
  CHECK(g.hom);
  CHECK_FALSE(g.sigma);
  CHECK_FALSE(g.orth);
  PropertyReport s = property_checks(sy, 2, 2);
  CHECK(s.fst);
  CHECK(s.sigma);
  CHECK(s.orth);
  CHECK(s.hom);
  CHECK_FALSE(s.fil);
  PropertyReport h = property_checks(half, 2, 2);
  CHECK(h.fst);
  CHECK(h.hom);
  CHECK_FALSE(h.sigma);
  CHECK_FALSE(h.fil);
}

TEST_CASE("GS(t) deformation: derivatives, resummation and the t-adic recursion") {
  const int n = 2, cap = 2, torder = 5;
  auto a = generic_input<Rational>(n, cap);
  CHECK(equal_tuples(omega_r(a, 0, torder), gs_chain(a)));
  Tuple<TFormalElement> fam = omega_family(a, torder);
  for (const Rational& t0 : {rat(1, 2), rat(1)}) {
    Tuple<FormalElement> summed;
    bool certified = true;
    for (const auto& x : fam)
      summed.push_back(FormalElement::from_terms(n, cap, 0, [&] {
        std::vector<FormalElement::Term> terms;
        for (const auto& [w, c] : x.terms()) {
          Rational v;
          certified = certified && resum_at(c, t0, v);
          if (sgn(v) != 0) terms.push_back({w, v});
        }
        return terms;
      }()));
    CHECK(certified);
    CHECK(equal_tuples(summed, o_omega(connection_gs_at(n, t0), a)));
  }
  // first derivative against the linear term of the family
  Tuple<FormalElement> d1 = omega_r(a, 1, torder);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    FormalElement lin(n, cap);
    for (const auto& [w, c] : fam[i].terms())
      if (sgn(c[1]) != 0) lin += FormalElement::monomial(n, cap, w, c[1]);
    CHECK((lin - d1[i]).is_zero());
  }
  auto iterates = omega_recursion(a, torder, 3);
  const SeriesConnection family = connection_gs_series(n, torder);
  Tuple<TFormalElement> as;
  for (const auto& x : fam) (void)x;
  for (const auto& x : a) {
    std::vector<TFormalElement::Term> terms;
    for (const auto& [w, c] : x.terms()) terms.push_back({w, TPoly(c, torder)});
    as.push_back(TFormalElement::from_terms(n, cap, torder, std::move(terms)));
  }
  for (int k = 0; k <= 3; ++k) {
    CAPTURE(k);
    const auto& q = iterates[static_cast<std::size_t>(k)];
    CHECK(t_valuation(tuple_sub(q, fam)) >= k + 1);
    CHECK(t_valuation(connection_apply(family, q, tuple_sub(as, q))) >= k + 1);
    if (k < 3) CHECK(t_valuation(tuple_sub(iterates[static_cast<std::size_t>(k) + 1], q)) >= k + 1);
  }
}
