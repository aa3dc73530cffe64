#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "conetrace/cli.hpp"
#include "conetrace/spectral_compare.hpp"
#include "doctest.h"
#include "json.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const std::string kExamples = CONETRACE_EXAMPLES_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "conetrace");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = conetrace::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "conetrace_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CacheEnv {
  CacheEnv() { setenv("CONETRACE_CACHE", (scratch() / "cache").c_str(), 1); }
};
const CacheEnv cache_env;

}  // namespace

TEST_CASE("dlspec on the doubled square") {
  auto r = run_cli({"dlspec", "--surface", kExamples + "/square.json", "--max-length", "3"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  bool two = false, diag = false;
  for (const auto& e : j["lengths"]) {
    double L = e["length"].get<double>();
    two = two || std::abs(L - 2.0) < 1e-9;
    diag = diag || std::abs(L - 2 * std::sqrt(2.0)) < 1e-9;
  }
  CHECK(two);
  CHECK(diag);
  CHECK(j["manifest_id"].is_string());
  CHECK(j["tool_version"] == conetrace::kToolVersion);
}

TEST_CASE("diffract prints the closed form value") {
  auto r = run_cli({"diffract", "--alpha", "12.566370614", "--theta-in", "0", "--theta-out", "0"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["value"]["re"].get<double>() == doctest::Approx(0.0));
  CHECK(j["value"]["im"].get<double>() == doctest::Approx(-1.0 / (4 * pi)).epsilon(1e-9));
  CHECK(j["sign_convention"] == "exp(-i*pi*nu)");
  CHECK(j["method"] == "closed_form");

  auto m = run_cli({"diffract", "--alpha", "12.566370614359172", "--theta-in", "0", "--theta-out", "0", "--mode-sum"});
  REQUIRE(m.code == 0);
  auto jm = json::parse(m.out);
  CHECK(jm["method"] == "mode_sum");
  CHECK(jm["value"]["im"].get<double>() == doctest::Approx(-1.0 / (4 * pi)).epsilon(1e-8));

  auto sing = run_cli({"diffract", "--alpha", "12.566370614359172", "--theta-in", "0", "--theta-out",
                       "3.141592653589793"});
  CHECK(sing.code == 2);
  CHECK(sing.err.find("error:") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"compare", "--surface", kExamples + "/square.json", "--eigs", "missing.txt"}).code == 2);
  CHECK(run_cli({"dlspec", "--surface", kExamples + "/square.json", "--max-length", "3", "--bogus"}).code == 64);
  CHECK(run_cli({"frobnicate"}).code == 64);
  CHECK(run_cli({}).code == 64);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"dlspec", "--help"}).code == 0);
  CHECK(run_cli({"dlspec", "--surface", "nope.json", "--max-length", "3"}).code == 2);
  CHECK(run_cli({"dlspec", "--surface", kExamples + "/square.json", "--max-length", "-1"}).code == 2);
  CHECK(run_cli({"geodesics", "--surface", kExamples + "/square.json", "--max-length", "30", "--node-budget", "100",
                 "--no-cache"})
            .code == 3);
}

TEST_CASE("geodesics, trace and bands") {
  auto g = run_cli({"geodesics", "--surface", kExamples + "/two_point.json", "--max-length", "4.5"});
  REQUIRE(g.code == 0);
  auto jg = json::parse(g.out);
  CHECK(jg["geodesics"].size() == 2);
  CHECK(jg["geodesics"][0]["id"] == "0+0-");

  auto t = run_cli({"trace", "--surface", kExamples + "/two_point.json", "--max-length", "4.5"});
  REQUIRE(t.code == 0);
  auto jt = json::parse(t.out);
  REQUIRE(jt["singularities"].size() == 2);
  CHECK(jt["singularities"][0]["exponent"]["num"] == 0);
  CHECK(jt["singularities"][0]["log"] == true);
  CHECK(jt["singularities"][0]["location"].get<double>() == doctest::Approx(2.0));

  auto b = run_cli({"bands", "--surface", kExamples + "/two_point.json", "--epsilon", "0.1"});
  REQUIRE(b.code == 0);
  auto jb = json::parse(b.out);
  CHECK(jb["rho_star"].get<double>() == 0.5);
  CHECK(jb["applicable"] == true);
  CHECK(jb["hypotheses"]["escape"] == "UNCHECKED");
}

TEST_CASE("compare on the doubled square") {
  auto dir = scratch();
  auto eigs = dir / "square_eigs.txt";
  {
    std::ofstream out(eigs);
    out.precision(17);
    for (double v : conetrace::doubled_rectangle_frequencies(1.0, 1.0, 400.0).values) out << v << "\n";
  }
  auto report = dir / "report.json";
  auto csv = dir / "trace.csv";
  auto r = run_cli({"compare", "--surface", kExamples + "/square.json", "--eigs", eigs.string(), "--sigma", "0.02",
                    "--tmin", "0.5", "--tmax", "3", "--out", report.string(), "--csv", csv.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  auto j = json::parse(slurp(report));
  CHECK(j["unmatched_peaks"].empty());
  CHECK(j["matches"].size() == 2);
  CHECK(fs::exists(fs::path(report.string() + ".manifest.json")));
  auto manifest = json::parse(slurp(report.string() + ".manifest.json"));
  CHECK(manifest["id"] == j["manifest_id"]);
  CHECK(manifest["outputs"].size() == 2);
  auto text = slurp(csv);
  CHECK(text.rfind("t,re,im,abs\n", 0) == 0);
}

TEST_CASE("outputs are byte-identical across runs") {
  auto dir = scratch();
  for (std::vector<std::string> args :
       {std::vector<std::string>{"geodesics", "--surface", kExamples + "/square.json", "--max-length", "4"},
        std::vector<std::string>{"trace", "--surface", kExamples + "/triangle.json", "--max-length", "4"},
        std::vector<std::string>{"bands", "--surface", kExamples + "/two_squares_exterior.json", "--epsilon", "0.2"}}) {
    auto a = dir / "a.json", b = dir / "b.json";
    auto with_a = args, with_b = args;
    with_a.insert(with_a.end(), {"--out", a.string()});
    with_b.insert(with_b.end(), {"--out", b.string(), "--no-cache", "--threads", "3"});
    REQUIRE(run_cli(with_a).code == 0);
    REQUIRE(run_cli(with_b).code == 0);
    auto ta = slurp(a), tb = slurp(b);
    // --no-cache and --threads do not enter the manifest id.
    CHECK(ta == tb);
  }
}

TEST_CASE("trace CSV export") {
  auto dir = scratch();
  auto csv = dir / "transform.csv";
  auto r = run_cli({"trace", "--surface", kExamples + "/two_point.json", "--max-length", "2.5", "--transform-csv",
                    csv.string(), "--tau-points", "5"});
  REQUIRE(r.code == 0);
  auto text = slurp(csv);
  CHECK(text.rfind("location,t,re,im,abs\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}
