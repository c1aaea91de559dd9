#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fqortho/formal.hpp"

namespace fqo {

// Expansion coefficients of an n-tuple E_k = (sum p (R/Q)..(R/Q) Q^kappa) Q_k around the base
// generators; letters are 0-based typed-letter indices.
template <class C>
struct CoeffTable {
  using Key = std::pair<std::vector<int>, unsigned>;  // (letters, kappa)

  int n = 0;
  int max_r = 0;
  std::vector<std::map<Key, C>> entries;  // [k - 1]

  const C* find(int k, const std::vector<int>& letters, unsigned kappa = 0) const {
    const auto& m = entries.at(static_cast<std::size_t>(k - 1));
    auto it = m.find({letters, kappa});
    return it == m.end() ? nullptr : &it->second;
  }

  // kappa = 0 slice at level r, row-major over letter sequences.
  std::vector<C> slice(int k, int r, const C& zero) const {
    const int count = letter_count(n);
    std::size_t total = 1;
    for (int i = 0; i < r; ++i) total *= static_cast<std::size_t>(count);
    std::vector<C> out(total, zero);
    for (const auto& [key, c] : entries.at(static_cast<std::size_t>(k - 1))) {
      if (key.second != 0 || static_cast<int>(key.first.size()) != r) continue;
      std::size_t idx = 0;
      for (int l : key.first) idx = idx * static_cast<std::size_t>(count) + static_cast<std::size_t>(l);
      out[idx] = c;
    }
    return out;
  }

  // True when every entry with kappa != 0 vanishes, the shape of sign-linear operations.
  bool kappa_free() const {
    for (const auto& m : entries)
      for (const auto& [key, c] : m)
        if (key.second != 0) return false;
    return true;
  }

  template <class D, class F>
  CoeffTable<D> map(F&& f) const {
    CoeffTable<D> out;
    out.n = n;
    out.max_r = max_r;
    for (const auto& m : entries) {
      std::map<Key, D> mm;
      for (const auto& [key, c] : m) {
        D d = f(c);
        if (!is_zero(d)) mm.emplace(key, std::move(d));
      }
      out.entries.push_back(std::move(mm));
    }
    return out;
  }

  friend bool operator==(const CoeffTable& a, const CoeffTable& b) {
    return a.n == b.n && a.max_r == b.max_r && a.entries == b.entries;
  }
};

using RationalTable = CoeffTable<Rational>;
using SeriesTable = CoeffTable<TPoly>;

// Reads E_k Q_k^{-1} word by word; words above max_r are dropped.
template <class C>
CoeffTable<C> extract_coeff_table(const Tuple<BasicFormal<C>>& e, int max_r) {
  CoeffTable<C> t;
  t.n = e.at(0).n();
  t.max_r = max_r;
  for (std::size_t k = 0; k < e.size(); ++k) {
    BasicFormal<C> qk = BasicFormal<C>::generator(t.n, e[k].cap(), static_cast<int>(k) + 1, e[k].torder());
    BasicFormal<C> x = e[k] * (-qk);
    std::map<typename CoeffTable<C>::Key, C> m;
    for (const auto& [w, c] : x.terms())
      if (w.degree() <= max_r) m.emplace(typename CoeffTable<C>::Key{w.letters(), w.qmask()}, c);
    t.entries.push_back(std::move(m));
  }
  return t;
}

// Dense P-matrix views for n = 2 style reporting: level 1 as a row, level 2 as a square.
struct PMatrices {
  std::vector<std::vector<Rational>> p0;                 // [s] -> {value}
  std::vector<std::vector<Rational>> p1;                 // [s] -> row
  std::vector<std::vector<std::vector<Rational>>> p2;    // [s] -> rows
};

PMatrices p_matrices(const RationalTable& t);

// Expected tables for n = 2 at levels 0..2: "gs", "sy", or "gst" at parameter t.
PMatrices reference_tables(const std::string& name, const Rational& t = Rational(0));

struct TableDiff {
  std::size_t compared = 0;
  std::size_t mismatched = 0;
  std::vector<std::string> details;
};

TableDiff compare_tables(const PMatrices& got, const PMatrices& want);

// The index symmetry swapping the roles of the two generators: letter (j, iota) -> (3 - j, iota reversed);
// on r_1..r_8 it is (15)(27)(36)(48).
int varpi_letter(int letter);
// p^{[1]}(t) = p^{[2]}_{varpi}(1/t) and vice versa, exact, all levels of both tables.
bool varpi_symmetry_check(const RationalTable& at_t, const RationalTable& at_inverse_t);

// Evaluates a truncated series f(t) at rational t0 by re-expanding in u = t / (1 + t);
// certified only when the u-expansion terminates below the truncation order.
bool resum_at(const TPoly& f, const Rational& t0, Rational& value);

}  // namespace fqo
