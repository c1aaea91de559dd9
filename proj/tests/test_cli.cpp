#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fqortho/serialize.hpp"
#include "support.hpp"

using namespace fqo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  Run r;
  FILE* p = popen((std::string(FQORTHO_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(FQORTHO_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / ("fqortho_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gs returns a Clifford input unchanged") {
  Run r = cli("orthogonalize --method gs --input " + data("clifford.json"));
  REQUIRE(r.code == 0);
  MatrixTuple in = matrix_tuple_from_json(read_json_file(data("clifford.json")));
  MatrixTuple out = matrix_tuple_from_json(parse_json_text(r.out)["system"]);
  CHECK(tuple_distance(in, out) < 1e-12);
}

TEST_CASE("sy on the two-vector case matches the stored Loewdin result") {
  Run r = cli("orthogonalize --method sy --input " + data("lowdin_case.json"));
  REQUIRE(r.code == 0);
  MatrixTuple expect = matrix_tuple_from_json(read_json_file(data("lowdin_expected.json")));
  CHECK(tuple_distance(matrix_tuple_from_json(parse_json_text(r.out)["system"]), expect) < 1e-8);
}

TEST_CASE("fsy2 reports the inverse-integral residual") {
  Run r = cli("orthogonalize --method fsy2 --input " + data("pair.json"));
  REQUIRE(r.code == 0);
  Json d = parse_json_text(r.out)["diagnostics"];
  CHECK(d["inverse_integral_residual"].get<double>() < 1e-8);
  CHECK(d["alternative_form_deviation"].get<double>() < 1e-8);
}

TEST_CASE("output is byte-identical across runs") {
  for (const char* args : {"orthogonalize --method sy --input ", "orthogonalize --method fgs --input "}) {
    Run a = cli(args + data("near.json")), b = cli(args + data("near.json"));
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
  CHECK(cli("expand --omega sy --n 2 --degree 2").out == cli("expand --omega sy --n 2 --degree 2").out);
}

TEST_CASE("orthogonalize output re-verifies") {
  const fs::path dir = scratch_dir();
  for (const char* method : {"gs", "sy", "fsy", "weighted --weights 1,3"}) {
    const fs::path res = dir / "res.json";
    REQUIRE(cli(std::string("orthogonalize --method ") + method + " --input " + data("near.json") + " --output " +
                res.string())
                .code == 0);
    Run v = cli("verify --input " + data("near.json") + " --against " + res.string());
    CHECK_MESSAGE(v.code == 0, method);
    CHECK(parse_json_text(v.out)["pass"] == true);
  }
  Run bad = cli("verify --input " + data("near.json") + " --against " + data("near.json"));
  CHECK(bad.code == 1);
  CHECK(parse_json_text(bad.out)["pass"] == false);
  fs::remove_all(dir);
}

TEST_CASE("exit codes separate domain and convergence failures") {
  CHECK(cli("orthogonalize --method sy --input " + data("near.json") + " --max-iter 0").code == 3);
  CHECK(cli("orthogonalize --method gs --input " + data("missing.json")).code == 2);
  CHECK(cli("orthogonalize --method nope --input " + data("near.json")).code == 2);
  CHECK(cli("expand --omega gs --n 4 --degree 3").code == 2);

  const fs::path dir = scratch_dir();
  const fs::path zero = dir / "zero.json";
  std::ofstream(zero) << "{\"n\": 1, \"d\": 2, \"matrices\": [[0, 0, 0, 0]]}\n";
  CHECK(cli("orthogonalize --method gs --input " + zero.string()).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("several inputs are processed in parallel with one output per file") {
  const fs::path dir = scratch_dir();
  const std::string inputs = data("near.json") + " " + data("clifford.json") + " " + data("pair.json");
  REQUIRE(cli("orthogonalize --method gs --jobs 3 --output-dir " + dir.string() + " --input " + inputs).code == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    const std::string name = e.path().filename().string();
    CHECK(slurp(e.path()) == cli("orthogonalize --method gs --input " + data(name)).out);
  }
  CHECK(files == 3);
  fs::remove_all(dir);
}

TEST_CASE("expand, count and transport examples") {
  Run gs = cli("expand --omega gs --n 2 --degree 2 --check-paper --output /dev/null");
  CHECK(gs.code == 0);
  CHECK(gs.out.find("match: 100%") != std::string::npos);
  Run sy = cli("expand --omega sy --n 2 --degree 2 --check-paper --output /dev/null");
  CHECK(sy.out.find("match: 100%") != std::string::npos);
  Run half = cli("expand --omega gst --t 1/2 --n 2 --degree 2 --varpi-check --output /dev/null");
  CHECK(half.code == 0);
  CHECK(half.out.find("varpi symmetry: pass") != std::string::npos);

  Run c = cli("count --kind fq-op-vl --n 2 --r 1");
  REQUIRE(c.code == 0);
  CHECK(parse_json_text(c.out)["counts"][0]["count"] == 10);

  const fs::path dir = scratch_dir();
  const fs::path target = dir / "target.json";
  REQUIRE(cli("orthogonalize --method sy --input " + data("near.json") + " --output " + target.string()).code == 0);
  Run t = cli("transport --from " + data("clifford.json") + " --to " + target.string() + " --steps 200");
  REQUIRE(t.code == 0);
  CHECK(parse_json_text(t.out)["residual"].get<double>() <= 1e-7);
  fs::remove_all(dir);
}
