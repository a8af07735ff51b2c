#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "laakso_lab/cli.hpp"

using laakso_lab::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "laakso-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("generate laakso json and dot") {
    const auto r = invoke({"generate", "laakso", "--n", "1", "--b", "3", "--format", "json"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["vertices"].size() == 6);
    CHECK(j["edges"].size() == 7);
    const auto dot = invoke({"generate", "laakso", "--n", "2", "--b", "3", "--format", "dot"});
    CHECK(dot.code == 0);
    CHECK(dot.out.rfind("graph G2_b3 {", 0) == 0);
  }

  TEST_CASE("generate tree and phimap") {
    const auto t = invoke({"generate", "tree", "--b", "2", "--d", "2"});
    CHECK(t.code == 0);
    CHECK(json::parse(t.out)["vertices"].size() == 7);
    const auto m = invoke({"generate", "phimap", "--n", "1", "--b", "2"});
    CHECK(m.code == 0);
    CHECK(json::parse(m.out)["assign"].size() == 15);
  }

  TEST_CASE("verify phi passes and reports counts") {
    const auto r = invoke({"verify", "phi", "--n", "2", "--b", "2"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["passed"] == true);
    CHECK(j["schema"] == 1);
    CHECK(j["tree_vertices"] == 1023);
    CHECK(invoke({"verify", "phi", "--n", "1", "--b", "2", "--exhaustive"}).code == 0);
    CHECK(invoke({"verify", "phi", "--n", "2", "--b", "3", "--samples", "8", "--seed", "3"}).code == 0);
    CHECK(invoke({"verify", "phi", "--exhaustive", "--samples", "3"}).code == 2);
  }

  TEST_CASE("a faulty phi exits 1 with a replayable counterexample") {
    const auto r = invoke({"verify", "phi", "--n", "2", "--b", "2", "--fault", "{1}"});
    CHECK(r.code == 1);
    const auto j = json::parse(r.out);
    CHECK(j["passed"] == false);
    CHECK(j["violated"].size() >= 1);
    REQUIRE(j.contains("counterexample"));
    const std::string cx = j["counterexample"].dump();
    const auto again = invoke({"verify", "phi", "--n", "2", "--b", "2", "--fault", "{1}", "--replay", cx});
    CHECK(again.code == 1);
    CHECK(json::parse(again.out)["holds"] == false);
    const auto fixed = invoke({"verify", "phi", "--n", "2", "--b", "2", "--replay", cx});
    CHECK(fixed.code == 0);
    CHECK(invoke({"verify", "phi", "--replay", "{not json"}).code == 2);
  }

  TEST_CASE("verify james") {
    const auto r = invoke({"verify", "james", "--theta", "3/4", "--indices", "8", "--maxsize", "4"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["passed"] == true);
    CHECK(j["lemma"]["subsets"] == 163);
    CHECK(invoke({"verify", "james", "--theta", "5/4"}).code == 2);
    CHECK(invoke({"verify", "james", "--theta", "x"}).code == 2);
  }

  TEST_CASE("verify all is deterministic and catches the injected fault") {
    const auto a = invoke({"verify", "all", "--seed", "0"});
    const auto b = invoke({"verify", "all", "--seed", "0"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(json::parse(a.out)["passed"] == true);
    const auto bad = invoke({"verify", "all", "--inject-fault"});
    CHECK(bad.code == 1);
    const auto j = json::parse(bad.out);
    REQUIRE(j.contains("failures"));
    CHECK(j["failures"][0]["suite"] == "phi");
    CHECK(j["failures"][0]["report"].contains("replay"));
    CHECK(json::parse(invoke({"verify", "all", "--timings"}).out)["suites"][0].contains("seconds"));
  }

  TEST_CASE("analyze map and fork on a map file") {
    const auto m = invoke({"generate", "phimap", "--n", "1", "--b", "2"});
    const std::string path = "cli_test_map.json";
    {
      std::ofstream f(path);
      f << m.out;
    }
    const auto a = invoke({"analyze", "map", "--input", path, "--delta-grid", "0,1,2"});
    CHECK(a.code == 0);
    const auto j = json::parse(a.out);
    CHECK(j["lip"] == 1.0);
    CHECK(j["profile"].size() == 3);
    CHECK(j["profile"][0]["c_atd"] == 1.0);
    const auto f = invoke({"fork", "--input", path, "--eps", "0", "--rmin", "1"});
    CHECK(f.code == 0);
    CHECK(json::parse(f.out)["witness"]["r"] == 1.0);
    std::remove(path.c_str());
    CHECK(invoke({"analyze", "map", "--input", "does-not-exist.json"}).code == 2);
  }

  TEST_CASE("fork on phi") {
    const auto r = invoke({"fork", "--n", "1", "--b", "2", "--eps", "0", "--rmin", "1"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["witness"]["sigma2"] == json::parse("[[1,2],[1,3]]"));
    CHECK(j["beta_bound"] == 0.0);
    CHECK(invoke({"fork", "--n", "1", "--b", "2", "--rmin", "5"}).code == 1);
    const auto sep = invoke({"fork", "--n", "3", "--b", "4", "--rmin", "3", "--arms", "4", "--separation"});
    CHECK(sep.code == 0);
    CHECK(json::parse(sep.out)["separation"]["passed"] == true);
  }

  TEST_CASE("moduli tables and the grid check") {
    const auto r = invoke({"moduli", "--p", "2", "--kind", "beta", "--tmin", "0.01", "--tmax", "0.5", "--points", "50"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("t,value\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 51);
    const auto l = invoke({"moduli", "check-lemma42", "--p", "2"});
    CHECK(l.code == 0);
    CHECK(json::parse(l.out)["passed"] == true);
    CHECK(invoke({"moduli", "check-lemma42", "--p", "3", "--sign", "minus"}).code == 0);
    CHECK(invoke({"moduli", "--p", "0.5"}).code == 2);
    CHECK(invoke({"moduli", "--kind", "gamma"}).code == 2);
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"bogus"}).code == 2);
    CHECK(invoke({"generate"}).code == 2);
    CHECK(invoke({"generate", "laakso", "--n", "9"}).code == 2);
    CHECK(invoke({"generate", "laakso", "--format", "svg"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
  }

  TEST_CASE("output files") {
    const std::string path = "cli_test_out.csv";
    CHECK(invoke({"--out", path, "moduli", "--points", "3"}).code == 0);
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,value");
    std::remove(path.c_str());
    CHECK(invoke({"--out", "/nonexistent-dir/x.csv", "moduli"}).code == 2);
  }

  TEST_CASE("tree node parsing") {
    using laakso_lab::cli::parse_tree_node;
    CHECK(parse_tree_node("{1,3}") == laakso_lab::TreeNode{1, 3});
    CHECK(parse_tree_node("1,3") == laakso_lab::TreeNode{1, 3});
    CHECK(parse_tree_node("{}").is_root());
    CHECK_THROWS(parse_tree_node("{3,1}"));
    CHECK_THROWS(parse_tree_node("{1.5}"));
  }
}
