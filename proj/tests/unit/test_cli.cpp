#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "exitwaves/cli_app.hpp"

using namespace exitwaves;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("exitwaves_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "exitwaves");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kThree = R"({
  "agents": [{"family": "exponential", "b": 1, "beta": 1},
             {"family": "exponential", "b": 1, "beta": 1.2},
             {"family": "exponential", "b": 1, "beta": 2}],
  "scope_bounds": {"lo": 0.1, "hi": 10},
  "sim": {"n_paths": 400, "seed": 3},
  "scan": {"steps": 8}
})";

}  // namespace

TEST_SUITE("cli_app") {
  TEST_CASE("validate") {
    const auto ok = run({"validate", write_temp("ok.json", kThree)});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("\"beta\": 1.2") != std::string::npos);
    const auto low_beta = run({"validate", write_temp("low.json", R"({"agents":[{"family":"exponential","b":1,"beta":0.5}],
      "scope_bounds":{"lo":0.1,"hi":10}})")});
    CHECK(low_beta.code == 2);
    CHECK(low_beta.err.find("beta") != std::string::npos);
    const auto no_bounds = run({"validate", write_temp("nob.json", R"({"agents":[{"family":"exponential","b":1}]})")});
    CHECK(no_bounds.code == 2);
    const auto unknown = run({"validate", write_temp("unk.json", R"({"agents":[{"family":"exponential","b":1}],
      "scope_bounds":{"lo":0.1,"hi":10},"colour":"red"})")});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("colour") != std::string::npos);
    CHECK(run({"validate", "/nonexistent/file.json"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
  }

  TEST_CASE("solve and schedule") {
    const auto path = write_temp("three.json", kThree);
    const auto solve = run({"solve", path});
    CHECK(solve.code == 0);
    CHECK(solve.out.rfind("agent,sigma,cost_rate,drawdown\n", 0) == 0);
    CHECK(solve.out.find("1.026834238") != std::string::npos);
    const auto eq = run({"schedule", path, "--mode", "eq"});
    CHECK(eq.out.find("1,\"{1,2,3}\",\"{1,2,3}\",2,1.026834238") != std::string::npos);
    CHECK(eq.out.find("total,1.88252") != std::string::npos);
    const auto sp = run({"schedule", path, "--mode", "sp"});
    CHECK(sp.out.find("3.26152") != std::string::npos);
    CHECK(sp.out.find("total,4.8922") != std::string::npos);
    CHECK(sp.out.find("L1,1") != std::string::npos);
    const auto two = run({"schedule", write_temp("two.json", R"({"agents":[{"family":"exponential","b":1,"beta":1},
      {"family":"exponential","b":1,"beta":1.2},{"family":"exponential","b":1,"beta":8}],
      "scope_bounds":{"lo":0.1,"hi":10}})")});
    CHECK(two.out.find("\"{1,2} | {3}\"") != std::string::npos);
    CHECK(run({"solve", path, "--mode", "xx"}).code == 2);
  }

  TEST_CASE("simulate is deterministic and writes samples") {
    const auto path = write_temp("three.json", kThree);
    const auto dump = (std::filesystem::temp_directory_path() / "exitwaves_cli_samples.csv").string();
    const auto a = run({"simulate", path, "--seed", "5", "--dump-samples", dump});
    const auto b = run({"simulate", path, "--seed", "5", "--threads", "2"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("quantity,analytic,mc_mean,mc_se,z,agreement") != std::string::npos);
    std::ifstream f(dump);
    std::string header;
    std::getline(f, header);
    CHECK(header == "path_id,wave,tau,M_tau,payoff_1,payoff_2,payoff_3");
    CHECK(run({"simulate", path, "--mode", "penalty"}).code == 2);
  }

  TEST_CASE("simulate penalty") {
    const auto path = write_temp("pen.json", R"({"agents":[{"family":"exponential","b":1,"beta":1},
      {"family":"exponential","b":1,"beta":20}],"scope_bounds":{"lo":0.1,"hi":10},
      "sim":{"n_paths":500},"penalty":{"alpha":0.5}})");
    const auto r = run({"simulate", path, "--mode", "penalty"});
    CHECK(r.code == 0);
    CHECK(r.out.find("conditional_continuation,0.717") != std::string::npos);
    CHECK(r.out.find("continuation_frequency") != std::string::npos);
  }

  TEST_CASE("scan") {
    const auto path = write_temp("three.json", kThree);
    const auto svg = (std::filesystem::temp_directory_path() / "exitwaves_cli_scan.svg").string();
    const auto r = run({"scan", path, "--svg", svg});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    int rows = -1;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 64);
    CHECK(r.out.find("1.5,4.5,{1}{2}{3}") != std::string::npos);
    CHECK(std::filesystem::file_size(svg) > 100);
    const auto bad = run({"scan", write_temp("bad.json", R"({"agents":[{"family":"exponential","b":1}],
      "scope_bounds":{"lo":0.1,"hi":10},"scan":{}})")});
    CHECK(bad.code == 2);
  }

  TEST_CASE("scan cells") {
    ScenarioConfig cfg = parse_scenario(nlohmann::json::parse(kThree));
    cfg.scan->beta2_range = {1.1, 1.3};
    cfg.scan->beta3_range = {1.5, 8.5};
    cfg.scan->steps = 2;
    const auto cells = exit_wave_scan(cfg);
    // (1.15, 3.25), (1.15, 6.75), (1.25, 3.25), (1.25, 6.75)
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].equilibrium == "{1,2,3}");
    CHECK(cells[1].equilibrium == "{1,2}{3}");
    CHECK(cells[0].planner == "{1,2,3}");
    CHECK(exit_wave_scan(cfg, 3)[3].equilibrium == cells[3].equilibrium);
  }
}
