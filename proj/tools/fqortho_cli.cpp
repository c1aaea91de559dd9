#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fqortho/analytic.hpp"
#include "fqortho/serialize.hpp"

using namespace fqo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitDomain = 2;
constexpr int kExitConvergence = 3;

int exit_code_for(const Error& e) { return e.error_class() == ErrorClass::convergence ? kExitConvergence : kExitDomain; }

void write_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("BadOutput", "cannot write " + tmp, ErrorClass::input);
    out << text;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail("BadOutput", "cannot move " + tmp + " to " + path, ErrorClass::input);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty())
    std::cout << text;
  else
    write_atomically(output, text);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& x : split(s, ',')) out.push_back(parse_rational(x));
  if (out.empty()) fail("BadOption", "empty list", ErrorClass::input);
  return out;
}

// "a,b;c,d" row by row
std::vector<std::vector<Rational>> parse_rational_matrix(const std::string& s) {
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : split(s, ';')) rows.push_back(parse_rational_list(r));
  for (const auto& r : rows)
    if (r.size() != rows.size()) fail("BadOption", "--eta must be square", ErrorClass::input);
  return rows;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        int lo = std::stoi(part.substr(0, dash)), hi = std::stoi(part.substr(dash + 1));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      fail("BadOption", "not an integer list: " + s, ErrorClass::input);
    }
  }
  if (out.empty()) fail("BadOption", "empty integer list", ErrorClass::input);
  return out;
}

// bare tuple or an orthogonalize output
MatrixTuple load_tuple(const std::string& path) {
  Json j = read_json_file(path);
  if (j.is_object() && j.contains("system")) return matrix_tuple_from_json(j["system"]);
  return matrix_tuple_from_json(j);
}

template <class T>
std::vector<std::vector<T>> transpose(const std::vector<std::vector<T>>& u) {
  std::vector<std::vector<T>> t(u.size(), std::vector<T>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) t[i][j] = u[j][i];
  return t;
}

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

std::vector<std::vector<double>> to_doubles(const std::vector<std::vector<Rational>>& m) {
  std::vector<std::vector<double>> out;
  for (const auto& r : m) out.push_back(to_doubles(r));
  return out;
}

// ---------------------------------------------------------------------------
// orthogonalize

struct OrthoFlags {
  std::vector<std::string> inputs;
  std::string output;
  std::string output_dir;
  std::string method = "gs";
  std::string backend = "matrix";
  std::string weights;
  std::string eta;
  double tol = 1e-12;
  int max_iter = 500;
  unsigned seed = 1;
  bool average_check = false;
  int jobs = 1;
};

Json gs_diagnostics(const GSResult<DenseMatrix>& r, const char* relation) {
  Json d;
  d["CP"] = r.cp_residual;
  d[relation] = r.lgs_residual;
  d["NSp"] = r.nsp_margin;
  return d;
}

double nsp_margin(const MatrixTuple& a, const MatrixTuple& q) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.size(); ++k) m = std::min(m, min_real_part(a[k] * mat_inverse(q[k])));
  return m;
}

Json orthogonalize_matrix(const OrthoFlags& f, const MatrixTuple& a) {
  IterationOptions opt;
  opt.tol = f.tol;
  opt.max_iter = f.max_iter;
  Json diag;
  MatrixTuple q;
  MatrixOperation method;
  const std::string& m = f.method;
  if (m == "gs") {
    auto r = ogs(a);
    q = r.system;
    diag = gs_diagnostics(r, "LGS");
    diag["iterations"] = 0;
    method = [](const MatrixTuple& x) { return ogs(x).system; };
  } else if (m == "fgs") {
    auto r = ofgs(a);
    q = r.system;
    diag = gs_diagnostics(r, "LGS");
    diag["iterations"] = 0;
    method = [](const MatrixTuple& x) { return ofgs(x).system; };
  } else if (m == "sy" || m == "fsy") {
    const bool floating = m == "fsy";
    IterationResult run;
    auto r = floating ? o_fsy_matrix(a, opt, &run) : o_sy_matrix(a, opt, &run);
    q = r.system;
    diag = gs_diagnostics(r, floating ? "MTI" : "MTC");
    diag["iterations"] = run.iterations;
    diag["step_residual"] = run.residual;
    method = [opt, floating](const MatrixTuple& x) {
      return floating ? o_fsy_matrix(x, opt).system : o_sy_matrix(x, opt).system;
    };
  } else if (m == "fsy2") {
    if (a.size() != 2) fail("BadOption", "fsy2 needs exactly two inputs", ErrorClass::input);
    ClosedFsyReport rep;
    q = closed_fsy_n2(a[0], a[1], &rep);
    diag["CP"] = rep.floating_residual;
    diag["MTI"] = rep.mti_residual;
    diag["NSp"] = nsp_margin(a, q);
    diag["iterations"] = 0;
    diag["alternative_form_deviation"] = rep.alternative_form_deviation;
    diag["inverse_integral_residual"] = inverse_system_identity_residual(a[0], a[1], q);
    method = [](const MatrixTuple& x) { return closed_fsy_n2(x[0], x[1]); };
  } else if (m == "weighted" || m == "eta") {
    std::vector<double> w;
    std::vector<std::vector<double>> rot;
    if (m == "weighted") {
      if (f.weights.empty()) fail("BadOption", "--weights is required", ErrorClass::input);
      w = to_doubles(parse_rational_list(f.weights));
    } else {
      if (f.eta.empty()) fail("BadOption", "--eta is required", ErrorClass::input);
      EtaReduction red = reduce_eta(to_doubles(parse_rational_matrix(f.eta)));
      w = red.weights;
      rot = red.rotation;
    }
    if (w.size() != a.size()) fail("BadOption", "one weight per input is needed", ErrorClass::input);
    auto run_one = [opt, w, rot](const MatrixTuple& x) {
      if (rot.empty()) return o_weighted_matrix(w, x, opt);
      IterationResult r = o_weighted_matrix(w, rotate_tuple(rot, x), opt);
      r.system = rotate_tuple(transpose(rot), r.system);
      return r;
    };
    IterationResult r = run_one(a);
    q = r.system;
    diag["CP"] = clifford_residual(q);
    diag["connection_residual"] = r.residual;
    diag["NSp"] = nsp_margin(a, q);
    diag["iterations"] = r.iterations;
    method = [run_one](const MatrixTuple& x) { return run_one(x).system; };
  } else {
    fail("BadOption", "unknown method " + m, ErrorClass::input);
  }
  if (f.average_check) {
    auto rep = orthogonal_average_check(method, a, orthogonal_samples(static_cast<int>(a.size()), 8, f.seed));
    diag["orthogonal_average_deviation"] = rep.max_deviation;
    diag["orthogonal_average_samples"] = rep.samples;
  }
  Json out;
  out["method"] = m;
  out["backend"] = "matrix";
  out["system"] = matrix_tuple_to_json(q);
  out["diagnostics"] = std::move(diag);
  return out;
}

Json orthogonalize_formal(const OrthoFlags& f, const Json& input) {
  Tuple<FormalElement> a = formal_input_from_json(input);
  const int n = static_cast<int>(a.size());
  const std::string& m = f.method;
  OmegaRun run;
  Tuple<FormalElement> q;
  if (m == "gs" || m == "fgs") {
    q = o_omega(connection_gs(n), a, m == "fgs", &run);
  } else if (m == "sy" || m == "fsy") {
    q = o_omega(connection_sy(n), a, m == "fsy", &run);
  } else if (m == "weighted") {
    if (f.weights.empty()) fail("BadOption", "--weights is required", ErrorClass::input);
    q = o_omega(connection_weighted(parse_rational_list(f.weights)), a, false, &run);
  } else if (m == "eta") {
    if (f.eta.empty()) fail("BadOption", "--eta is required", ErrorClass::input);
    ExactEtaReduction red = reduce_eta_exact(parse_rational_matrix(f.eta));
    q = rotate_tuple(transpose(red.rotation),
                     o_omega(connection_weighted(red.weights), rotate_tuple(red.rotation, a), false, &run));
  } else {
    fail("BadOption", "method " + m + " has no formal backend", ErrorClass::input);
  }
  Json sys = Json::array();
  for (const auto& x : q) sys.push_back(formal_to_json(x));
  Json out;
  out["method"] = m;
  out["backend"] = "formal";
  out["system"] = std::move(sys);
  out["diagnostics"] = {{"iterations", run.iterations}, {"degree", a[0].cap()}};
  return out;
}

Json orthogonalize_one(const OrthoFlags& f, const std::string& path) {
  Json input = read_json_file(path);
  if (f.backend == "formal") return orthogonalize_formal(f, input);
  if (f.backend != "matrix") fail("BadOption", "backend must be matrix or formal", ErrorClass::input);
  return orthogonalize_matrix(f, matrix_tuple_from_json(input));
}

int cmd_orthogonalize(const OrthoFlags& f) {
  if (f.inputs.size() == 1 && f.output_dir.empty()) {
    emit(canonical_dump(orthogonalize_one(f, f.inputs[0])), f.output);
    return kExitOk;
  }
  if (f.output_dir.empty()) fail("BadOption", "several inputs need --output-dir", ErrorClass::input);
  std::filesystem::create_directories(f.output_dir);
  std::atomic<std::size_t> next{0};
  std::vector<int> codes(f.inputs.size(), kExitOk);
  std::mutex err_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < f.inputs.size();) {
      const std::string& in = f.inputs[i];
      const std::string out =
          (std::filesystem::path(f.output_dir) / std::filesystem::path(in).filename()).string();
      try {
        write_atomically(out, canonical_dump(orthogonalize_one(f, in)));
      } catch (const Error& e) {
        codes[i] = exit_code_for(e);
        std::lock_guard<std::mutex> lock(err_mutex);
        std::cerr << in << ": " << e.what() << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, f.jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  // convergence failures dominate domain failures
  int code = kExitOk;
  for (int c : codes) code = std::max(code, c);
  return code;
}

// ---------------------------------------------------------------------------
// expand

struct ExpandFlags {
  std::string omega = "gs";
  std::string t = "0";
  int n = 2;
  int degree = 2;
  bool floating = false;
  bool check_reference = false;
  bool varpi_check = false;
  std::string output;
};

RationalTable expand_table(const std::string& omega, int n, int degree, bool floating, const Rational& t) {
  if (omega == "gs") return extract_omega_tables<Rational>(connection_gs(n), n, degree, floating);
  if (omega == "sy") return extract_omega_tables<Rational>(connection_sy(n), n, degree, floating);
  if (omega == "gst") {
    if (t < 0) fail("BadOption", "--t must be non-negative", ErrorClass::input);
    return extract_omega_tables<Rational>(connection_gs_at(n, t), n, degree, floating);
  }
  fail("BadOption", "--omega must be gs, sy or gst", ErrorClass::input);
}

int cmd_expand(const ExpandFlags& f) {
  const Rational t = parse_rational(f.t);
  table_cost_guard(f.n, f.degree);
  RationalTable table = expand_table(f.omega, f.n, f.degree, f.floating, t);
  Json out;
  out["omega"] = f.omega;
  if (f.omega == "gst") out["t"] = rational_to_json(t);
  out["floating"] = f.floating;
  out["table"] = table_to_json(table);
  std::vector<std::string> summary;
  bool ok = true;
  if (f.n == 2 && f.degree >= 2) out["P"] = pmatrices_to_json(p_matrices(table));
  if (f.check_reference) {
    if (f.n != 2 || f.degree < 2 || f.floating)
      fail("BadOption", "--check-paper compares the ordinary n = 2 tables up to degree 2", ErrorClass::input);
    TableDiff diff = compare_tables(p_matrices(table), reference_tables(f.omega, t));
    const double pct = diff.compared ? 100.0 * double(diff.compared - diff.mismatched) / double(diff.compared) : 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "match: %g%%", pct);
    Json check;
    check["compared"] = diff.compared;
    check["mismatched"] = diff.mismatched;
    check["details"] = diff.details;
    out["check_reference"] = std::move(check);
    summary.push_back(std::string(buf) + " (" + std::to_string(diff.compared - diff.mismatched) + "/" +
                      std::to_string(diff.compared) + " entries)");
    for (const auto& d : diff.details) summary.push_back("  " + d);
    ok = ok && diff.mismatched == 0;
  }
  if (f.varpi_check) {
    if (f.n != 2) fail("BadOption", "--varpi-check needs n = 2", ErrorClass::input);
    if (f.omega == "gst" && t == 0) fail("BadOption", "--varpi-check needs t > 0", ErrorClass::input);
    RationalTable inv = f.omega == "gst" ? expand_table(f.omega, f.n, f.degree, f.floating, 1 / t) : table;
    const bool pass = varpi_symmetry_check(table, inv);
    out["varpi_symmetry"] = pass;
    summary.push_back(std::string("varpi symmetry: ") + (pass ? "pass" : "FAIL"));
    ok = ok && pass;
  }
  const std::string text = canonical_dump(out);
  if (f.output.empty()) {
    std::cout << text;
    for (const auto& s : summary) std::cerr << s << "\n";
  } else {
    write_atomically(f.output, text);
    for (const auto& s : summary) std::cout << s << "\n";
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyFlags {
  std::string input;
  std::string against;
  std::string method = "auto";
  double tol = 1e-8;
  std::string output;
};

Json condition(double residual, bool pass) { return {{"residual", residual}, {"pass", pass}}; }

int cmd_verify(const VerifyFlags& f) {
  MatrixTuple a = load_tuple(f.input);
  Json against = read_json_file(f.against);
  std::string method = f.method;
  if (against.contains("system")) {
    if (method == "auto" && against.contains("method")) method = against["method"].get<std::string>();
    against = against["system"];
  }
  if (method == "auto") method = "gs";
  MatrixTuple q = matrix_tuple_from_json(against);
  if (q.size() != a.size() || q[0].dim() != a[0].dim())
    fail("MismatchedShape", "input and result differ in shape", ErrorClass::input);
  Json conds;
  bool pass = true;
  auto add = [&](const char* name, double residual, bool ok) {
    conds[name] = condition(residual, ok);
    pass = pass && ok;
  };
  if (method == "gs" || method == "fgs") {
    CharacterizationReport rep = check_gs_characterization(a, q, method == "fgs", f.tol);
    add("CP", rep.cp_residual, rep.cp);
    add("LGS", rep.lgs_residual, rep.lgs);
    add("NSp", rep.nsp_margin, rep.nsp);
  } else if (method == "sy" || method == "weighted" || method == "eta") {
    const double cp = clifford_residual(q);
    add("CP", cp, cp <= f.tol);
    if (method == "sy") {
      const double mtc = mtc_residual(a, q);
      add("MTC", mtc, mtc <= f.tol);
    }
    const double nsp = nsp_margin(a, q);
    add("NSp", nsp, nsp > 0);
  } else if (method == "fsy" || method == "fsy2") {
    const double cp = floating_residual(q, 1);
    add("CP", cp, cp <= f.tol);
    const double mti = mti_residual(a, q);
    add("MTI", mti, mti <= f.tol);
    const double nsp = nsp_margin(a, q);
    add("NSp", nsp, nsp > 0);
  } else {
    fail("BadOption", "unknown method " + method, ErrorClass::input);
  }
  Json out;
  out["method"] = method;
  out["conditions"] = std::move(conds);
  out["pass"] = pass;
  emit(canonical_dump(out), f.output);
  return pass ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// transport

struct TransportFlags {
  std::string from;
  std::string to;
  int steps = 100;
  bool floating = false;
  std::string output;
};

Json square_matrix_json(const DenseMatrix& m) { return {{"d", m.dim()}, {"entries", matrix_to_json(m)}}; }

int cmd_transport(const TransportFlags& f) {
  if (f.steps < 1) fail("BadOption", "--steps must be positive", ErrorClass::input);
  MatrixTuple q = load_tuple(f.from);
  MatrixTuple r = load_tuple(f.to);
  if (q.size() != r.size() || q[0].dim() != r[0].dim())
    fail("MismatchedShape", "systems differ in shape", ErrorClass::input);
  Json out;
  out["floating"] = f.floating;
  out["steps"] = f.steps;
  if (!f.floating) {
    DenseMatrix h = pt_gs(r, q, f.steps);
    out["conjugator"] = square_matrix_json(h);
    out["residual"] = tuple_distance(Ad(h, q), r);
  } else {
    FPair<DenseMatrix> p = pt_fgs(r, q, f.steps);
    MatrixTuple moved;
    for (const auto& x : q) moved.push_back(p.left * x * p.right);
    out["left"] = square_matrix_json(p.left);
    out["right"] = square_matrix_json(p.right);
    out["residual"] = tuple_distance(moved, r);
  }
  emit(canonical_dump(out), f.output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// count

struct CountFlags {
  std::string kind;
  std::string n;
  std::string r;
  bool enumerate = false;
  std::string output;
};

int cmd_count(const CountFlags& f) {
  const CountKind kind = parse_count_kind(f.kind);
  Json rows = Json::array();
  for (int n : parse_int_list(f.n))
    for (int r : parse_int_list(f.r)) {
      Json row;
      row["n"] = n;
      row["r"] = r;
      row["count"] = coeff_count(n, r, kind);
      if (f.enumerate) row["enumerated"] = coeff_count_enumerated(n, r, kind);
      rows.push_back(std::move(row));
    }
  Json out;
  out["kind"] = count_kind_name(kind);
  out["counts"] = std::move(rows);
  emit(canonical_dump(out), f.output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clifford-system orthogonalization: matrix and exact formal backends"};
  app.require_subcommand(1);

  OrthoFlags of;
  auto* ortho = app.add_subcommand("orthogonalize", "orthogonalize a tuple of matrices or formal elements");
  ortho->add_option("--input", of.inputs, "input JSON file(s)")->required()->check(CLI::ExistingFile);
  ortho->add_option("--output", of.output, "output file (default stdout)");
  ortho->add_option("--output-dir", of.output_dir, "directory for per-input outputs");
  ortho->add_option("--method", of.method, "gs, fgs, sy, fsy, fsy2, weighted or eta")
      ->check(CLI::IsMember({"gs", "fgs", "sy", "fsy", "fsy2", "weighted", "eta"}));
  ortho->add_option("--backend", of.backend, "matrix or formal")->check(CLI::IsMember({"matrix", "formal"}));
  ortho->add_option("--weights", of.weights, "comma-separated positive weights");
  ortho->add_option("--eta", of.eta, "symmetric positive matrix, rows separated by ';'");
  ortho->add_option("--tol", of.tol, "iteration tolerance");
  ortho->add_option("--max-iter", of.max_iter, "iteration limit");
  ortho->add_option("--seed", of.seed, "seed of the random rotations in --average-check");
  ortho->add_flag("--average-check", of.average_check, "report the deviation under orthogonal mixing of the inputs");
  ortho->add_option("--jobs", of.jobs, "parallel workers for several inputs");

  ExpandFlags ef;
  auto* expand = app.add_subcommand("expand", "coefficient tables of an orthogonalization");
  expand->add_option("--omega", ef.omega, "gs, sy or gst")->check(CLI::IsMember({"gs", "sy", "gst"}));
  expand->add_option("--t", ef.t, "parameter of gst (rational)");
  expand->add_option("--n", ef.n, "number of generators");
  expand->add_option("--degree", ef.degree, "maximal letter degree");
  expand->add_flag("--floating", ef.floating, "floating variant");
  expand->add_flag("--check-paper", ef.check_reference, "compare with the reference tables");
  expand->add_flag("--varpi-check", ef.varpi_check, "check the t -> 1/t index symmetry");
  expand->add_option("--output", ef.output, "output file (default stdout)");

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "check the defining conditions of a result");
  verify->add_option("--input", vf.input, "input tuple")->required()->check(CLI::ExistingFile);
  verify->add_option("--against", vf.against, "result tuple or orthogonalize output")->required()->check(CLI::ExistingFile);
  verify->add_option("--method", vf.method, "conditions to check (default: from the result file, else gs)");
  verify->add_option("--tol", vf.tol, "residual tolerance");
  verify->add_option("--output", vf.output, "output file (default stdout)");

  TransportFlags tf;
  auto* transport = app.add_subcommand("transport", "parallel transport between nearby systems");
  transport->add_option("--from", tf.from, "start system")->required()->check(CLI::ExistingFile);
  transport->add_option("--to", tf.to, "end system")->required()->check(CLI::ExistingFile);
  transport->add_option("--steps", tf.steps, "integrator steps");
  transport->add_flag("--floating", tf.floating, "floating systems");
  transport->add_option("--output", tf.output, "output file (default stdout)");

  CountFlags cf;
  auto* count = app.add_subcommand("count", "number of free coefficients");
  count->add_option("--kind", cf.kind, "fq-op, fq-op-vl, fq-orth, conform-op, conform-op-vl, conform-orth")->required();
  count->add_option("--n", cf.n, "n values, e.g. 2 or 1-3 or 1,3")->required();
  count->add_option("--r", cf.r, "r values")->required();
  count->add_flag("--enumerate", cf.enumerate, "also count by direct enumeration");
  count->add_option("--output", cf.output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitDomain;
  }

  try {
    if (*ortho) return cmd_orthogonalize(of);
    if (*expand) return cmd_expand(ef);
    if (*verify) return cmd_verify(vf);
    if (*transport) return cmd_transport(tf);
    if (*count) return cmd_count(cf);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitDomain;
}
