#include "test_util.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "mahler/io.hpp"

using namespace mt;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(MAHLER_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path fixture_dir() {
  fs::path dir = fs::temp_directory_path() / "mahler_cli_fixtures";
  fs::create_directories(dir);
  return dir;
}

std::string write_fixture(const std::string& name, const std::string& content) {
  fs::path p = fixture_dir() / name;
  std::ofstream(p) << content;
  return p.string();
}

std::string shellq(const std::string& s) { return "'" + s + "'"; }

// The power-tower series sum x^(2^n) below 64 with the equation
// F(x^2) = F(x) - x written as -F + F(x^2) = -x.
std::string tower_series() {
  return write_fixture("tower.json",
                       R"({"terms": [["1","1"],["2","1"],["4","1"],["8","1"],)"
                       R"(["16","1"],["32","1"]], "cutoff": "64"})");
}

std::string doubling_equation() {
  return write_fixture("doubling.json",
                       R"({"base": {"p": 2, "q": 1},)"
                       R"( "coeffs": [{"terms": [["0","-1"]], "cutoff": "inf"},)"
                       R"( {"terms": [["0","1"]], "cutoff": "inf"}],)"
                       R"( "rhs": {"terms": [["1","-1"]], "cutoff": "inf"}})");
}

}  // namespace

TEST_CASE("verify accepts the doubling identity for the power-tower prefix") {
  CliResult r = run_cli("--json verify --series " + shellq(tower_series()) +
                        " --equation " + shellq(doubling_equation()));
  REQUIRE(r.code == 0);
  Json out = Json::parse(r.out);
  CHECK(out.at("command") == "verify");
  CHECK(out.at("verdict").at("kind") == "Verified");
  CHECK(out.at("verdict").at("checked_below") == "64");
  // every effective parameter is spelled out, no hidden defaults
  CHECK(out.at("params").contains("precision_cap"));
  CHECK(out.at("params").contains("seed"));
}

TEST_CASE("verify accepts the zero series for a homogeneous equation") {
  std::string zero = write_fixture("zero.json", R"({"terms": [], "cutoff": "inf"})");
  std::string eq = write_fixture(
      "homog2.json",
      R"({"base": {"p": 2, "q": 1},)"
      R"( "coeffs": [{"terms": [["0","-1"]], "cutoff": "inf"},)"
      R"( {"terms": [["0","1"],["1","1"]], "cutoff": "inf"}]})");
  CliResult r = run_cli("--json verify --series " + shellq(zero) + " --equation " +
                        shellq(eq));
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out).at("verdict").at("kind") == "Verified");

  // a merely truncated zero checks an empty window, which proves nothing
  std::string thin = write_fixture("zero16.json", R"({"terms": [], "cutoff": "16"})");
  CliResult t = run_cli("--json verify --series " + shellq(thin) + " --equation " +
                        shellq(eq));
  REQUIRE(t.code == 3);
  CHECK(Json::parse(t.out).at("verdict").at("kind") == "Inconclusive");
}

TEST_CASE("verify maps a refuted identity to exit 2") {
  std::string wrong = write_fixture(
      "wrong.json", R"({"terms": [["1","1"],["2","2"]], "cutoff": "8"})");
  CliResult r = run_cli("--json verify --series " + shellq(wrong) + " --equation " +
                        shellq(doubling_equation()));
  REQUIRE(r.code == 2);
  Json out = Json::parse(r.out);
  CHECK(out.at("verdict").at("kind") == "Refuted");
  CHECK(out.at("verdict").contains("first_failure"));
}

TEST_CASE("solve reports an obstruction as a definite negative") {
  std::string eq = write_fixture(
      "threehalves.json",
      R"({"base": {"p": 3, "q": 2},)"
      R"( "coeffs": [{"terms": [["0","1"],["1","-2"]], "cutoff": "inf"},)"
      R"( {"terms": [["0","-1"],["2","1"]], "cutoff": "inf"}]})");
  std::string seeds = write_fixture("seed1.json", R"([["1", "1"]])");
  CliResult r = run_cli("--json solve --equation " + shellq(eq) + " --seeds " +
                        shellq(seeds) + " --cutoff 20");
  REQUIRE(r.code == 2);
  Json out = Json::parse(r.out);
  CHECK(out.at("obstruction").at("at") == "1");
  CHECK(out.at("obstruction").at("residual") == "1");

  // the admissible valuation 0 extends fine, just not to a Laurent series
  std::string good = write_fixture("seed0.json", R"([["0", "1"]])");
  CliResult ok = run_cli("--json solve --equation " + shellq(eq) + " --seeds " +
                         shellq(good) + " --cutoff 4");
  REQUIRE(ok.code == 0);
  CHECK(Json::parse(ok.out).at("solution").at("cutoff") == "4");
}

TEST_CASE("homogenized output re-parses and verifies against the same series") {
  CliResult h = run_cli("--json homogenize --equation " + shellq(doubling_equation()));
  REQUIRE(h.code == 0);
  Json hom = Json::parse(h.out);
  std::string eq = write_fixture("doubling_hom.json", hom.at("equation").dump());
  CliResult v = run_cli("--json verify --series " + shellq(tower_series()) +
                        " --equation " + shellq(eq));
  REQUIRE(v.code == 0);
  CHECK(Json::parse(v.out).at("verdict").at("kind") == "Verified");
}

TEST_CASE("guess recovers the geometric equation in canonical form") {
  std::string geo;
  {
    Json terms = Json::array();
    for (int k = 0; k < 32; ++k) terms.push_back(Json::array({std::to_string(k), "1"}));
    Json f;
    f["terms"] = terms;
    f["cutoff"] = "32";
    geo = write_fixture("geo.json", f.dump());
  }
  CliResult r = run_cli("--json guess --series " + shellq(geo) +
                        " --base 2 --d-max 1 --deg-max 1");
  REQUIRE(r.code == 0);
  Json eq = Json::parse(r.out).at("equation");
  CHECK(eq.at("base").at("p") == 2);
  CHECK(eq.at("coeffs")[0].at("terms") == Json::parse(R"([["0","-1"]])"));
  CHECK(eq.at("coeffs")[1].at("terms") == Json::parse(R"([["0","1"],["1","1"]])"));

  CliResult c = run_cli("--json certify --series " + shellq(geo) + " --deg-max 2");
  REQUIRE(c.code == 0);
  Json cert = Json::parse(c.out).at("certificate");
  CHECK(cert.at("U").at("terms") == Json::parse(R"([["0","1"]])"));
  CHECK(cert.at("V").at("terms") == Json::parse(R"([["0","1"],["1","-1"]])"));

  // an impossible base finds nothing and says so with exit 2
  CliResult miss = run_cli("--json guess --series " + shellq(geo) +
                           " --base 5 --d-max 1 --deg-max 0");
  REQUIRE(miss.code == 2);
  CHECK(Json::parse(miss.out).at("result") == "not-found");
}

TEST_CASE("output bytes are stable across reruns") {
  std::string args = "--json combine --equation-a " +
                     shellq(write_fixture("g2.json",
                                          R"({"base": {"p": 2, "q": 1},)"
                                          R"( "coeffs": [{"terms": [["0","-1"]], "cutoff": "inf"},)"
                                          R"( {"terms": [["0","1"],["1","1"]], "cutoff": "inf"}]})")) +
                     " --equation-b " +
                     shellq(write_fixture("g3.json",
                                          R"({"base": {"p": 3, "q": 1},)"
                                          R"( "coeffs": [{"terms": [["0","-1"]], "cutoff": "inf"},)"
                                          R"( {"terms": [["0","1"],["1","1"],["2","1"]], "cutoff": "inf"}]})")) +
                     " --n 1 --m 1";
  CliResult a = run_cli(args);
  CliResult b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  Json eq = Json::parse(a.out).at("equation");
  CHECK(eq.at("base").at("p") == 6);
  CHECK(Json::parse(a.out).at("l") == "1");
}

TEST_CASE("exit codes separate usage errors from inconclusive runs") {
  // missing required option
  CHECK(run_cli("verify --series missing-equation").code == 1);
  // unknown subcommand
  CHECK(run_cli("conjure").code == 1);
  // unreadable input file
  CliResult bad = run_cli("--json verify --series /nonexistent.json --equation " +
                          shellq(doubling_equation()));
  REQUIRE(bad.code == 1);
  CHECK(Json::parse(bad.out).at("error").at("code") == "ParseError");
  // a window too small to pin the unknowns is inconclusive, not an error
  CliResult thin = run_cli("--json guess --series " + shellq(tower_series()) +
                           " --base 2 --d-max 3 --deg-max 4");
  REQUIRE(thin.code == 3);
  CHECK(Json::parse(thin.out).at("error").at("code") == "WindowTooSmall");
  // so is a walk whose solution support accumulates below the cutoff
  std::string acc = write_fixture(
      "accumulating.json",
      R"({"base": {"p": 2, "q": 1},)"
      R"( "coeffs": [{"terms": [["4","1"]], "cutoff": "inf"},)"
      R"( {"terms": [["0","1"]], "cutoff": "inf"},)"
      R"( {"terms": [["0","-1"]], "cutoff": "inf"}]})");
  std::string seed = write_fixture("seed_acc.json", R"([["0", "1"]])");
  CliResult stuck = run_cli("--json solve --equation " + shellq(acc) + " --seeds " +
                            shellq(seed) + " --cutoff 8 --max-steps 300");
  REQUIRE(stuck.code == 3);
  CHECK(Json::parse(stuck.out).at("error").at("code") == "StepLimit");
}

TEST_CASE("witness and obstruct cover both verdict directions") {
  CliResult w = run_cli("--json witness --alpha 2/3 --beta 5/3 --p 3 --window 10");
  REQUIRE(w.code == 0);
  CHECK(Json::parse(w.out).at("witness") == Json::array({1, -1}));

  CliResult none = run_cli("--json witness --alpha 2 --beta 8 --p 2 --window 2");
  REQUIRE(none.code == 2);
  CHECK(Json::parse(none.out).at("result") == "not-found");

  std::string a = write_fixture(
      "sym_a.json",
      R"({"base": {"symbol": "a", "pow": [1, 0]},)"
      R"( "scales": {"alpha": {"name": "a", "sqrt": "2"}},)"
      R"( "coeffs": [{"terms": [["1","1"]], "cutoff": "inf"},)"
      R"( {"terms": [["0","1"]], "cutoff": "inf"}]})");
  std::string b = write_fixture(
      "sym_b.json",
      R"({"base": {"symbol": "b", "pow": [1, 0]},)"
      R"( "scales": {"alpha": {"name": "b", "sqrt": "3"}},)"
      R"( "coeffs": [{"terms": [["2","1"]], "cutoff": "inf"},)"
      R"( {"terms": [["0","1"]], "cutoff": "inf"}]})");
  CliResult ob = run_cli("--json obstruct --equation-a " + shellq(a) +
                         " --equation-b " + shellq(b));
  REQUIRE(ob.code == 2);
  Json out = Json::parse(ob.out);
  CHECK(out.at("result") == "infeasible");
  CHECK(out.at("obstruction").at("base_a") == "a");
  CHECK(out.at("obstruction").at("pairs_b") == Json::parse("[[0,1]]"));
}
