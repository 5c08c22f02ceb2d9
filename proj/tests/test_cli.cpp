#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "rdeed/cli.hpp"
#include "support.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rdeed");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  Run r;
  r.code = rdeed::dispatch(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string golden_path(const std::string& name) { return std::string(RDEED_SOURCE_DIR) + "/tests/golden/" + name; }

// Structural equality; numbers agree to a relative 1e-12. Solver residuals are
// rounding noise and only need to be small on both sides.
bool same(const json& a, const json& b, const std::string& where, std::string& diff) {
  const bool residual = where.find("residual") != std::string::npos;
  if (residual && a.is_number() && b.is_number()) {
    if (a.get<double>() <= 1e-10 && b.get<double>() <= 1e-10) return true;
    diff = where + ": residual above 1e-10";
    return false;
  }
  if (a.is_number() && b.is_number()) {
    double x = a.get<double>(), y = b.get<double>();
    if (std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)})) return true;
    diff = where + ": " + a.dump() + " vs " + b.dump();
    return false;
  }
  if (a.type() != b.type()) {
    diff = where + ": type differs";
    return false;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) {
      diff = where + ": key sets differ";
      return false;
    }
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        diff = where + "." + it.key() + ": missing";
        return false;
      }
      if (!same(it.value(), b.at(it.key()), where + "." + it.key(), diff)) return false;
    }
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      diff = where + ": lengths differ";
      return false;
    }
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!same(a[k], b[k], where + "[" + std::to_string(k) + "]", diff)) return false;
    return true;
  }
  if (a == b) return true;
  diff = where + ": " + a.dump() + " vs " + b.dump();
  return false;
}

void check_golden(const std::vector<std::string>& args, const std::string& name) {
  Run r = run(args);
  REQUIRE(r.code == 0);
  json got = json::parse(r.out);
  CHECK(got.at("version") == "0.1.0");
  got.erase("version");
  std::ifstream in(golden_path(name));
  REQUIRE(in.good());
  json want = json::parse(in);
  want.erase("version");
  std::string diff;
  CHECK_MESSAGE(same(got, want, name, diff), diff);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("analyze abc") {
    Run r = run({"analyze", testing::fixture("abc.rxn")});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("m") == 2);
    CHECK(j.at("Q") == json::parse("[[1,0,1],[0,1,1]]"));
    CHECK(j.at("family") == "single");
    CHECK(j.at("detailed_balance").at("balanced") == true);
    check_golden({"analyze", testing::fixture("abc.rxn")}, "analyze_abc.json");
  }

  TEST_CASE("analyze with a state reports masses") {
    Run r = run({"analyze", testing::fixture("chain.rxn"), "--state", "1,1,1,1,1"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("masses") == json::parse("[3,3,3]"));
    CHECK(run({"analyze", testing::fixture("chain.rxn"), "--state", "1,1"}).code == 2);
  }

  TEST_CASE("constants chain") {
    Run r = run({"constants", testing::fixture("chain.rxn"), "--masses", "3,3,3"});
    REQUIRE(r.code == 0);
    json c = json::parse(r.out).at("constants");
    CHECK(c.at("H4").get<double>() == doctest::Approx(1.0 / 12));
    CHECK(c.at("family") == "chain");
    check_golden({"constants", testing::fixture("chain.rxn"), "--masses", "3,3,3"}, "constants_chain.json");
  }

  TEST_CASE("equilibrium chain") {
    check_golden({"equilibrium", testing::fixture("chain.rxn"), "--masses", "4,4,4"}, "equilibrium_chain.json");
  }

  TEST_CASE("output file mirrors stdout") {
    auto dir = std::filesystem::temp_directory_path() / "rdeed_cli_test";
    std::filesystem::create_directories(dir);
    auto file = (dir / "eq.json").string();
    Run r = run({"equilibrium", testing::fixture("abc.rxn"), "--masses", "2,2", "--out", file});
    REQUIRE(r.code == 0);
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == r.out);
  }

  TEST_CASE("simulate and fit-rate") {
    auto dir = std::filesystem::temp_directory_path() / "rdeed_cli_sim";
    Run r = run({"simulate", testing::fixture("abc.rxn"), "--masses", "2,2", "--grid", "16", "--tend", "2", "--out",
                 dir.string()});
    REQUIRE(r.code == 0);
    json s = json::parse(r.out);
    CHECK(s.at("has_reference") == true);
    CHECK(s.at("max_entropy_increase").get<double>() <= 1e-12);
    CHECK(std::filesystem::exists(dir / "trajectory.csv"));
    CHECK(std::filesystem::exists(dir / "snapshots.csv"));
    CHECK(std::filesystem::exists(dir / "summary.json"));
    Run f = run({"fit-rate", "--trajectory", (dir / "trajectory.csv").string()});
    REQUIRE(f.code == 0);
    double rate = json::parse(f.out).at("fit").at("rate").get<double>();
    CHECK(rate == doctest::Approx(s.at("decay_fit").at("rate").get<double>()).epsilon(1e-9));
  }

  TEST_CASE("verify commands") {
    Run e = run({"verify-eed", testing::fixture("abc.rxn"), "--masses", "2,2", "--grid", "8", "--samples", "50"});
    REQUIRE(e.code == 0);
    CHECK(json::parse(e.out).at("report").at("violations") == 0);
    Run l = run({"verify-lemma", "--lemma", "H4_chain", "--samples", "1000"});
    REQUIRE(l.code == 0);
    CHECK(json::parse(l.out).at("report").at("violations") == 0);
  }

  TEST_CASE("exit codes") {
    CHECK(run({"analyze", "/nonexistent/net.rxn"}).code == 1);
    Run missing = run({"constants", testing::fixture("abc.rxn")});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("--masses") != std::string::npos);
    CHECK(run({"constants", testing::fixture("abc.rxn"), "--masses", "1,2,3"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"equilibrium", testing::fixture("abc.rxn"), "--masses", "2,2", "--out", "/nonexistent/dir/x.json"})
              .code == 1);
    CHECK(run({"constants", testing::fixture("triangle.rxn"), "--masses", "3"}).code == 1);
    CHECK(run({"verify-lemma", "--lemma", "nope"}).code == 1);
  }
}
