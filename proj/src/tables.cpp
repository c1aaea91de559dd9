#include "fqortho/tables.hpp"

#include <set>

namespace fqo {

namespace {

using Row = std::vector<Rational>;
using Square = std::vector<Row>;

Row scaled_row(const Rational& f, const Row& r) {
  Row out;
  for (const auto& x : r) out.push_back(f * x);
  return out;
}

Square scaled_square(const Rational& f, const Square& m) {
  Square out;
  for (const auto& r : m) out.push_back(scaled_row(f, r));
  return out;
}

PMatrices gst_tables(const Rational& t) {
  if (sgn(t) < 0) fail("BadParameter", "GS(t) needs t >= 0", ErrorClass::input);
  const Rational one(1), z(0);
  const Rational u = one / (one + t);
  const Rational v = t / (one + t);
  const Rational u2 = u * u, tu2 = t * u2, ttu2 = t * t * u2;
  PMatrices p;
  p.p0 = {{one}, {one}};
  p.p1 = {{z, z, one, u, z, z, z, v}, {z, z, z, u, z, one, z, v}};
  const Rational h = rat(1, 2);
  Square first = {
      {z, z, -one, -u2, z, z, z, -tu2},
      {z, z, -u, -u, z, z, z, -v},
      {-one, -u, one, u, z, -v, z, v},
      {-u2, -u, u, u2, -tu2, v, z, tu2},
      {z, z, z, -tu2, z, z, z, -ttu2},
      {z, z, v, -v, z, z, -v, v},
      {z, z, z, z, z, -v, z, z},
      {-tu2, -v, v, tu2, -ttu2, -v, z, ttu2},
  };
  Square second = {
      {z, z, z, -u2, z, z, z, -tu2},
      {z, z, -u, z, z, z, z, z},
      {z, -u, z, u, z, u, z, -u},
      {-u2, z, -u, u2, -tu2, u, -u, tu2},
      {z, z, z, -tu2, z, -one, z, -ttu2},
      {z, z, -u, u, -one, one, -v, v},
      {z, z, z, -u, z, -v, z, -v},
      {-tu2, z, u, tu2, -ttu2, v, -v, ttu2},
  };
  p.p2 = {scaled_square(h, first), scaled_square(h, second)};
  return p;
}

PMatrices gs_tables() {
  const Rational o(1), z(0), h = rat(1, 2);
  PMatrices p;
  p.p0 = {{o}, {o}};
  p.p1 = {{z, z, o, o, z, z, z, z}, {z, z, z, o, z, o, z, z}};
  Square first = {
      {0, 0, -1, -1, 0, 0, 0, 0}, {0, 0, -1, -1, 0, 0, 0, 0}, {-1, -1, 1, 1, 0, 0, 0, 0},
      {-1, -1, 1, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0},   {0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0},   {0, 0, 0, 0, 0, 0, 0, 0},
  };
  Square second = {
      {0, 0, 0, -1, 0, 0, 0, 0},  {0, 0, -1, 0, 0, 0, 0, 0},  {0, -1, 0, 1, 0, 1, 0, -1},
      {-1, 0, -1, 1, 0, 1, -1, 0}, {0, 0, 0, 0, 0, -1, 0, 0}, {0, 0, -1, 1, -1, 1, 0, 0},
      {0, 0, 0, -1, 0, 0, 0, 0},  {0, 0, 1, 0, 0, 0, 0, 0},
  };
  p.p2 = {scaled_square(h, first), scaled_square(h, second)};
  return p;
}

PMatrices sy_tables() {
  const Rational o(1), z(0), h = rat(1, 2), e = rat(1, 8);
  PMatrices p;
  p.p0 = {{o}, {o}};
  p.p1 = {{z, z, o, h, z, z, z, h}, {z, z, z, h, z, o, z, h}};
  Square first = {
      {0, 0, -4, -1, 0, 0, 0, -1}, {0, 0, -2, -2, 0, 0, 0, -2}, {-4, -2, 4, 2, 0, -2, 0, 2},
      {-1, -2, 2, 1, -1, 2, 0, 1}, {0, 0, 0, -1, 0, 0, 0, -1},  {0, 0, 2, -2, 0, 0, -2, 2},
      {0, 0, 0, 0, 0, -2, 0, 0},   {-1, -2, 2, 1, -1, -2, 0, 1},
  };
  Square second = {
      {0, 0, 0, -1, 0, 0, 0, -1},  {0, 0, -2, 0, 0, 0, 0, 0},     {0, -2, 0, 2, 0, 2, 0, -2},
      {-1, 0, -2, 1, -1, 2, -2, 1}, {0, 0, 0, -1, 0, -4, 0, -1},  {0, 0, -2, 2, -4, 4, -2, 2},
      {0, 0, 0, -2, 0, -2, 0, -2},  {-1, 0, 2, 1, -1, 2, -2, 1},
  };
  p.p2 = {scaled_square(e, first), scaled_square(e, second)};
  return p;
}

std::string cell(const char* what, int s, int i, int j) {
  std::string out = std::string(what) + "[" + std::to_string(s) + "]";
  if (i > 0) out += "(" + std::to_string(i) + (j > 0 ? "," + std::to_string(j) : "") + ")";
  return out;
}

void diff_cell(TableDiff& d, const std::string& where, const Rational& got, const Rational& want) {
  ++d.compared;
  if (got == want) return;
  ++d.mismatched;
  d.details.push_back(where + ": computed " + format_rational(got) + ", expected " + format_rational(want));
}

}  // namespace

PMatrices p_matrices(const RationalTable& t) {
  PMatrices p;
  const int count = letter_count(t.n);
  for (int k = 1; k <= t.n; ++k) {
    const Rational zero(0);
    p.p0.push_back(t.slice(k, 0, zero));
    if (t.max_r >= 1) p.p1.push_back(t.slice(k, 1, zero));
    if (t.max_r >= 2) {
      Row flat = t.slice(k, 2, zero);
      Square sq;
      for (int i = 0; i < count; ++i)
        sq.emplace_back(flat.begin() + i * count, flat.begin() + (i + 1) * count);
      p.p2.push_back(std::move(sq));
    }
  }
  return p;
}

PMatrices reference_tables(const std::string& name, const Rational& t) {
  if (name == "gs") return gs_tables();
  if (name == "sy") return sy_tables();
  if (name == "gst") return gst_tables(t);
  fail("UnknownTable", "no reference table named " + name, ErrorClass::input);
}

TableDiff compare_tables(const PMatrices& got, const PMatrices& want) {
  TableDiff d;
  if (got.p0.size() != want.p0.size() || got.p1.size() != want.p1.size() || got.p2.size() != want.p2.size())
    fail("MismatchedShape", "tables cover different levels or outputs");
  for (std::size_t s = 0; s < want.p0.size(); ++s)
    diff_cell(d, cell("P0", int(s) + 1, 0, 0), got.p0[s].at(0), want.p0[s].at(0));
  for (std::size_t s = 0; s < want.p1.size(); ++s)
    for (std::size_t i = 0; i < want.p1[s].size(); ++i)
      diff_cell(d, cell("P1", int(s) + 1, int(i) + 1, 0), got.p1[s].at(i), want.p1[s][i]);
  for (std::size_t s = 0; s < want.p2.size(); ++s)
    for (std::size_t i = 0; i < want.p2[s].size(); ++i)
      for (std::size_t j = 0; j < want.p2[s][i].size(); ++j)
        diff_cell(d, cell("P2", int(s) + 1, int(i) + 1, int(j) + 1), got.p2[s].at(i).at(j), want.p2[s][i][j]);
  return d;
}

int varpi_letter(int letter) {
  const int j = letter_generator(2, letter);
  const unsigned iota = letter_iota(2, letter);
  const unsigned swapped = ((iota & 1u) << 1) | ((iota >> 1) & 1u);
  return letter_index(2, 3 - j, swapped);
}

bool varpi_symmetry_check(const RationalTable& at_t, const RationalTable& at_inverse_t) {
  if (at_t.n != 2 || at_inverse_t.n != 2) fail("BadShape", "the index symmetry is defined for n = 2");
  if (!at_t.kappa_free() || !at_inverse_t.kappa_free()) return false;
  const int levels = std::min(at_t.max_r, at_inverse_t.max_r);
  auto check = [&](const RationalTable& a, const RationalTable& b) {
    for (int k = 1; k <= 2; ++k) {
      std::set<std::vector<int>> keys;
      for (const auto& [key, c] : a.entries[k - 1])
        if (int(key.first.size()) <= levels) keys.insert(key.first);
      for (const auto& [key, c] : b.entries[2 - k]) {
        if (int(key.first.size()) > levels) continue;
        std::vector<int> back;
        for (int l : key.first) back.push_back(varpi_letter(l));
        keys.insert(back);
      }
      for (const auto& letters : keys) {
        std::vector<int> mapped;
        for (int l : letters) mapped.push_back(varpi_letter(l));
        const Rational* x = a.find(k, letters);
        const Rational* y = b.find(3 - k, mapped);
        Rational xv = x ? *x : Rational(0), yv = y ? *y : Rational(0);
        if (xv != yv) return false;
      }
    }
    return true;
  };
  return check(at_t, at_inverse_t) && check(at_inverse_t, at_t);
}

bool resum_at(const TPoly& f, const Rational& t0, Rational& value) {
  const int order = f.order();
  // g(u) = sum_m c_m u^m (1 - u)^{-m}, truncated at u^order
  std::vector<Rational> g(static_cast<std::size_t>(order) + 1, Rational(0));
  for (int m = 0; m <= order; ++m) {
    if (sgn(f[m]) == 0) continue;
    Rational binom(1);  // C(m + j - 1, j)
    for (int j = 0; m + j <= order; ++j) {
      if (j > 0) {
        binom *= m + j - 1;
        binom /= j;
      }
      g[static_cast<std::size_t>(m + j)] += f[m] * (m == 0 ? Rational(j == 0 ? 1 : 0) : binom);
    }
  }
  int top = -1;
  for (int k = 0; k <= order; ++k)
    if (sgn(g[static_cast<std::size_t>(k)]) != 0) top = k;
  if (top == order && order > 0) return false;
  const Rational u0 = t0 / (Rational(1) + t0);
  value = 0;
  for (int k = top; k >= 0; --k) value = value * u0 + g[static_cast<std::size_t>(k)];
  return true;
}

}  // namespace fqo
