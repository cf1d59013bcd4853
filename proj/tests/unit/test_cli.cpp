#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "dhp/baselines.hpp"
#include "dhp/simulate.hpp"
#include "dhp_cli/cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("dhp_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto h = dhp::testing::hawkes(dhp::KernelFamily::Exponential, {0.01, 0.008},
                                        dhp::testing::matrix(2, 2, {0.004, 0.001, 0.002, 0.004}), {0.01, 0.01});
    const auto sim = dhp::thinning_simulate(h, {40000.0, 3});
    std::ofstream out(path("ev.csv"));
    out << "time,mark\n";
    for (const auto& e : sim.sequence.events()) out << e.time << ',' << (e.mark == 0 ? "a" : "b") << '\n';
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "dhp");
  return dhp::cli::run(args);
}

}  // namespace

TEST_CASE("fit, evaluate, predict, simulate and export through the command line") {
  Workspace ws;
  const auto data = ws.path("ev.csv"), ck = ws.path("m.json");

  REQUIRE(run({"fit", "--model", "dhp", "--kernel", "exp", "--mixtures", "1", "--layers", "1", "--hidden", "4", "--epochs",
               "3", "--data", data, "--out", ck}) == 0);
  const auto checkpoint = json::parse(slurp(ck));
  REQUIRE(checkpoint.contains("training"));
  const double best = checkpoint["training"]["best_val_nll"].get<double>();
  CHECK(fs::exists(ck + ".log.jsonl"));

  SUBCASE("evaluate on the validation split reproduces the training record") {
    REQUIRE(run({"evaluate", "--model", ck, "--data", data, "--split", "validation", "--no-residuals", "--out",
                 ws.path("r.json")}) == 0);
    const auto report = json::parse(slurp(ws.path("r.json")));
    CHECK(report.contains("mape"));
    CHECK(std::abs(report["nll"]["per_event"].get<double>() - best) <= 1e-9);
  }
  SUBCASE("predict writes one row per interval and mark") {
    REQUIRE(run({"predict", "--model", ck, "--data", data, "--width", "3600", "--out", ws.path("p.csv")}) == 0);
    std::istringstream in(slurp(ws.path("p.csv")));
    std::string line;
    std::getline(in, line);
    CHECK(line == "interval_start,interval_end,mark,predicted,observed");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows > 0);
    CHECK(rows % 2 == 0);
  }
  SUBCASE("simulation is reproducible for a seed") {
    REQUIRE(run({"simulate", "--model", ck, "--horizon", "5000", "--seed", "4", "--out", ws.path("s1.csv")}) == 0);
    REQUIRE(run({"simulate", "--model", ck, "--horizon", "5000", "--seed", "4", "--out", ws.path("s2.csv")}) == 0);
    CHECK(slurp(ws.path("s1.csv")) == slurp(ws.path("s2.csv")));
    CHECK(slurp(ws.path("s1.csv.json")) == slurp(ws.path("s2.csv.json")));
  }
  SUBCASE("export writes a grid per mark") {
    REQUIRE(run({"export-dynamics", "--model", ck, "--points", "11", "--out-dir", ws.path("dyn")}) == 0);
    for (const char* label : {"a", "b"}) {
      std::istringstream in(slurp(ws.path(std::string("dyn/dynamics_") + label + ".csv")));
      std::string line;
      std::getline(in, line);
      CHECK(line == "t,f,F");
      std::size_t rows = 0;
      while (std::getline(in, line)) ++rows;
      CHECK(rows == 11);
    }
  }
}

TEST_CASE("config files supply defaults and the command line wins") {
  Workspace ws;
  const auto data = ws.path("ev.csv");
  REQUIRE(run({"fit", "--model", "hpp", "--epochs", "1", "--data", data, "--out", ws.path("h.json")}) == 0);
  {
    std::ofstream cfg(ws.path("cfg.json"));
    cfg << json{{"data", data}, {"predict", {{"width", 20000}, {"out", ws.path("a.csv")}}}}.dump();
  }
  REQUIRE(run({"predict", "--model", ws.path("h.json"), "--split", "all", "--config", ws.path("cfg.json")}) == 0);
  REQUIRE(run({"predict", "--model", ws.path("h.json"), "--split", "all", "--config", ws.path("cfg.json"), "--width",
               "10000", "--out", ws.path("b.csv")}) == 0);
  auto rows = [&](const std::string& p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n - 1;
  };
  CHECK(rows(ws.path("a.csv")) == 2 * 2);
  CHECK(rows(ws.path("b.csv")) == 2 * 4);
}

TEST_CASE("exit codes") {
  Workspace ws;
  CHECK(run({"--help"}) == 0);
  CHECK(run({}) == 2);
  CHECK(run({"fit", "--data", ws.path("ev.csv")}) == 2);
  CHECK(run({"fit", "--model", "nope", "--data", ws.path("ev.csv"), "--out", ws.path("x.json")}) != 0);
  {
    std::ofstream bad(ws.path("bad.csv"));
    bad << "time,mark\n5,a\n1,a\n";
  }
  CHECK(run({"fit", "--model", "hpp", "--data", ws.path("bad.csv"), "--out", ws.path("x.json")}) == 1);
}
