#include "fqortho/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fqo {

namespace {

[[noreturn]] void bad(const std::string& what) { fail("BadInput", what, ErrorClass::input); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int int_field(const Json& j, const char* key, int lo, int hi) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) bad(std::string("field \"") + key + "\" must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi)
    bad(std::string("field \"") + key + "\" must lie in " + std::to_string(lo) + ".." + std::to_string(hi));
  return static_cast<int>(x);
}

void dump_string(std::string& out, const std::string& s) {
  // reuse the library's escaping for one scalar
  out += Json(s).dump();
}

void dump(std::string& out, const Json& j, int indent, int level) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * level), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        dump_string(out, it.key());
        out += sep;
        dump(out, it.value(), indent, level + 1);
      }
      out += close + '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& x : j) flat = flat && !x.is_structured();
      out += '[';
      bool first = true;
      for (const auto& x : j) {
        if (!first) out += flat && indent > 0 ? ", " : ",";
        first = false;
        if (!flat) out += pad;
        dump(out, x, indent, level + 1);
      }
      if (!flat) out += close;
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      // keep floats recognizable as floats
      if (std::string_view(buf).find_first_of(".eE") == std::string_view::npos) out += ".0";
      return;
    }
    case Json::value_t::string:
      dump_string(out, j.get<std::string>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string canonical_dump(const Json& j, int indent) {
  std::string out;
  dump(out, j, indent, 0);
  out += '\n';
  return out;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

Json rational_to_json(const Rational& r) { return format_rational(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  bad("rational must be a \"num/den\" string or an integer");
}

Json matrix_to_json(const DenseMatrix& m) {
  Json row = Json::array();
  for (int i = 0; i < m.dim(); ++i)
    for (int k = 0; k < m.dim(); ++k) row.push_back(m(i, k));
  return row;
}

DenseMatrix matrix_from_json(const Json& j, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d * d)
    bad("each matrix must be a row-major array of d*d numbers");
  DenseMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const Json& v = j[static_cast<std::size_t>(i * d + k)];
      if (!v.is_number()) bad("matrix entries must be numbers");
      m(i, k) = v.get<double>();
    }
  return m;
}

Json matrix_tuple_to_json(const MatrixTuple& a) {
  Json j;
  j["n"] = a.size();
  j["d"] = a.empty() ? 0 : a[0].dim();
  Json ms = Json::array();
  for (const auto& m : a) ms.push_back(matrix_to_json(m));
  j["matrices"] = std::move(ms);
  return j;
}

MatrixTuple matrix_tuple_from_json(const Json& j) {
  const int n = int_field(j, "n", 1, 64);
  const int d = int_field(j, "d", 1, 4096);
  const Json& ms = field(j, "matrices");
  if (!ms.is_array() || static_cast<int>(ms.size()) != n) bad("\"matrices\" must hold n matrices");
  MatrixTuple a;
  for (const auto& m : ms) a.push_back(matrix_from_json(m, d));
  return a;
}

Json word_to_json(int n, const std::vector<int>& letters, unsigned kappa) {
  Json r = Json::array();
  for (int l : letters) r.push_back(Json::array({letter_generator(n, l), mask_bits(n, letter_iota(n, l))}));
  Json j;
  j["r"] = std::move(r);
  j["q"] = mask_bits(n, kappa);
  return j;
}

std::pair<std::vector<int>, unsigned> word_from_json(int n, const Json& j) {
  const Json& r = field(j, "r");
  if (!r.is_array()) bad("\"r\" must be an array of [j, iota] pairs");
  std::vector<int> letters;
  for (const auto& p : r) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_string())
      bad("letters are written [j, \"iota bits\"]");
    const int gen = p[0].get<int>();
    if (gen < 1 || gen > n) bad("letter generator out of range");
    letters.push_back(letter_index(n, gen, parse_mask_bits(n, p[1].get<std::string>())));
  }
  if (static_cast<int>(letters.size()) > kMaxFormalDegree) bad("word too long");
  const Json& q = field(j, "q");
  if (!q.is_string()) bad("\"q\" must be a bit string");
  return {letters, parse_mask_bits(n, q.get<std::string>())};
}

Json formal_to_json(const FormalElement& x) {
  Json j;
  j["n"] = x.n();
  j["cap"] = x.cap();
  Json terms = Json::array();
  for (const auto& [w, c] : x.terms()) {
    Json t;
    t["word"] = word_to_json(x.n(), w.letters(), w.qmask());
    t["c"] = rational_to_json(c);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

FormalElement formal_from_json(const Json& j) {
  const int n = int_field(j, "n", 1, kMaxFormalN);
  const int cap = int_field(j, "cap", 0, kMaxFormalDegree);
  FormalElement x(n, cap);
  for (const auto& t : field(j, "terms")) {
    auto [letters, kappa] = word_from_json(n, field(t, "word"));
    x += FormalElement::monomial(n, cap, Word::make(n, letters, kappa), rational_from_json(field(t, "c")));
  }
  return x;
}

Json table_to_json(const RationalTable& t) {
  Json j;
  j["n"] = t.n;
  j["max_r"] = t.max_r;
  Json entries = Json::array();
  for (std::size_t k = 0; k < t.entries.size(); ++k)
    for (const auto& [key, c] : t.entries[k]) {
      Json e;
      e["k"] = k + 1;
      e["word"] = word_to_json(t.n, key.first, key.second);
      e["c"] = rational_to_json(c);
      entries.push_back(std::move(e));
    }
  j["entries"] = std::move(entries);
  return j;
}

RationalTable table_from_json(const Json& j) {
  RationalTable t;
  t.n = int_field(j, "n", 1, kMaxFormalN);
  t.max_r = int_field(j, "max_r", 0, kMaxFormalDegree);
  t.entries.resize(static_cast<std::size_t>(t.n));
  for (const auto& e : field(j, "entries")) {
    const int k = int_field(e, "k", 1, t.n);
    auto key = word_from_json(t.n, field(e, "word"));
    if (static_cast<int>(key.first.size()) > t.max_r) bad("entry above max_r");
    Rational c = rational_from_json(field(e, "c"));
    if (!is_zero(c)) t.entries[static_cast<std::size_t>(k - 1)][key] = c;
  }
  return t;
}

Json pmatrices_to_json(const PMatrices& p) {
  auto row = [](const std::vector<Rational>& v) {
    Json r = Json::array();
    for (const auto& x : v) r.push_back(rational_to_json(x));
    return r;
  };
  Json j, p0 = Json::array(), p1 = Json::array(), p2 = Json::array();
  for (const auto& v : p.p0) p0.push_back(row(v));
  for (const auto& v : p.p1) p1.push_back(row(v));
  for (const auto& m : p.p2) {
    Json rows = Json::array();
    for (const auto& v : m) rows.push_back(row(v));
    p2.push_back(std::move(rows));
  }
  j["P0"] = std::move(p0);
  j["P1"] = std::move(p1);
  j["P2"] = std::move(p2);
  return j;
}

Json connection_to_json(const ConnectionData& w) {
  Json j;
  j["n"] = w.n();
  Json om = Json::array();
  for (int gen = 1; gen <= w.n(); ++gen)
    for (unsigned iota = 0; iota < (1u << w.n()); ++iota) {
      if (is_zero(w.at(gen, iota))) continue;
      Json e;
      e["j"] = gen;
      e["iota"] = mask_bits(w.n(), iota);
      e["c"] = rational_to_json(w.at(gen, iota));
      om.push_back(std::move(e));
    }
  j["omega"] = std::move(om);
  return j;
}

ConnectionData connection_from_json(const Json& j) {
  const int n = int_field(j, "n", 1, 8);
  ConnectionData w(n, "custom", Rational(0));
  for (const auto& e : field(j, "omega")) {
    const int gen = int_field(e, "j", 1, n);
    const Json& iota = field(e, "iota");
    if (!iota.is_string()) bad("\"iota\" must be a bit string");
    w.set(gen, parse_mask_bits(n, iota.get<std::string>()), rational_from_json(field(e, "c")));
  }
  std::string why;
  if (!w.valid(Rational(1), &why)) fail("InvalidConnection", why, ErrorClass::input);
  return w;
}

Json operation_data_to_json(const OperationData& p) {
  Json j;
  j["n"] = p.n;
  Json cs = Json::array();
  for (const auto& [key, c] : p.coeffs) {
    Json e;
    e["k"] = std::get<0>(key);
    e["word"] = word_to_json(p.n, std::get<1>(key), std::get<2>(key));
    e["c"] = rational_to_json(c);
    cs.push_back(std::move(e));
  }
  j["coeffs"] = std::move(cs);
  return j;
}

OperationData operation_data_from_json(const Json& j) {
  OperationData p;
  p.n = int_field(j, "n", 1, kMaxFormalN);
  for (const auto& e : field(j, "coeffs")) {
    const int k = int_field(e, "k", 1, p.n);
    auto [letters, kappa] = word_from_json(p.n, field(e, "word"));
    p.set(k, letters, kappa, rational_from_json(field(e, "c")));
  }
  return p;
}

Json orthogonalization_data_to_json(const OrthogonalizationData& p) {
  Json j;
  j["n"] = p.n;
  Json cs = Json::array();
  for (const auto& [letters, c] : p.coeffs) {
    Json e;
    e["r"] = word_to_json(p.n, letters, 0)["r"];
    e["c"] = rational_to_json(c);
    cs.push_back(std::move(e));
  }
  j["coeffs"] = std::move(cs);
  return j;
}

OrthogonalizationData orthogonalization_data_from_json(const Json& j) {
  OrthogonalizationData p;
  p.n = int_field(j, "n", 1, kMaxFormalN);
  for (const auto& e : field(j, "coeffs")) {
    Json w;
    w["r"] = field(e, "r");
    w["q"] = mask_bits(p.n, 0);
    p.set(word_from_json(p.n, w).first, rational_from_json(field(e, "c")));
  }
  return p;
}

Tuple<FormalElement> formal_input_from_json(const Json& j) {
  const int n = int_field(j, "n", 1, kMaxFormalN);
  const int degree = int_field(j, "degree", 0, kMaxFormalDegree);
  Tuple<FormalElement> a = base_generators<Rational>(n, degree);
  std::vector<FormalElement> extra(static_cast<std::size_t>(n), FormalElement(n, degree));
  const Json& pert = field(j, "perturbation");
  for (const auto& e : field(pert, "entries")) {
    const int k = int_field(e, "k", 1, n);
    auto [letters, kappa] = word_from_json(n, field(e, "word"));
    extra[static_cast<std::size_t>(k - 1)] +=
        FormalElement::monomial(n, degree, Word::make(n, letters, kappa), rational_from_json(field(e, "c")));
  }
  for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k)] += extra[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
  return a;
}

}  // namespace fqo
