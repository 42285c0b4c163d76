#include <doctest.h>

#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "commands.hpp"
#include "fluxfsp/error.hpp"
#include "fluxfsp/model_io.hpp"
#include "output.hpp"
#include "run_config.hpp"

using namespace fluxfsp;
using namespace fluxfsp::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fluxfsp_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

fs::path two_state_model(const fs::path& dir) {
  const fs::path p = dir / "two_state.json";
  std::ofstream(p) << R"({"name": "two_state", "species": ["A", "B"],
    "reactions": [{"stoichiometry": [-1, 1], "rate_law": {"type": "mass_action", "rate": 1.0}}],
    "initial_state": [1, 0]})";
  return p;
}

}  // namespace

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 10000; ++i) {
    double v;
    const std::uint64_t b = bits(rng);
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("snapshot file names") {
  CHECK(snapshot_filename(1e5) == "snapshot_100000.csv");
  CHECK(snapshot_filename(0.5) == "snapshot_0.5.csv");
  CHECK(snapshot_filename(0.0) == "snapshot_0.csv");
}

TEST_CASE("run config parsing") {
  const RunConfig c = parse_run_config(R"({
    "model": "toggle", "toggle_eta": 100, "output": "out",
    "solver": {"quantile_tol": 0.3, "flux_tol": 1e-7, "tf": 30, "checkpoints": [10, 20]},
    "box": {"lower": [0, 0], "upper": [10, 10]},
    "reference": {"method": "dense", "tol": 1e-11},
    "bench": {"sizes": [5], "trials": 3}})");
  CHECK(*c.model == "toggle");
  CHECK(c.toggle_eta == 100.0);
  CHECK(c.solver.quantile_tol == 0.3);
  CHECK(c.solver.checkpoint_times == std::vector<double>{10, 20});
  CHECK(c.box->upper == std::vector<Count>{10, 10});
  CHECK(c.reference.method == ReferenceMethod::Dense);
  CHECK(c.bench_trials == 3);
  CHECK_NOTHROW(c.validate());
  CHECK(resolve_model(c).network.propensity(0, State{0, 0}) == doctest::Approx(42000.0));

  CHECK_THROWS_AS(parse_run_config(R"({"modle": "toggle"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"solver": {"tf": "soon"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  RunConfig none;
  CHECK_THROWS_AS(none.validate(), ConfigError);
  RunConfig both;
  both.model = "toggle";
  both.model_file = "x.json";
  CHECK_THROWS_AS(both.validate(), ConfigError);
}

TEST_CASE("run writes trajectory, summary and snapshots") {
  const fs::path dir = scratch("run");
  RunConfig c;
  c.model_file = two_state_model(dir);
  c.output_dir = dir / "out";
  c.solver.tf = 2.0;
  c.solver.dt_tol = 0.05;
  c.solver.checkpoint_times = {1.0, 2.0};
  std::ostringstream log;
  REQUIRE(cmd_run(c, log) == kExitOk);

  const auto rows = read_csv(c.output_dir / "trajectory.csv");
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"t", "dt", "n_states", "phi_total", "phi_max", "phi_out",
                                            "model_err_bound", "step_err_bound", "mean_A", "mean_B"});
  double last = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][0]);
    CHECK(t > last);
    last = t;
  }
  CHECK(last == 2.0);

  const auto snap = read_csv(c.output_dir / "snapshot_1.csv");
  CHECK(snap[0] == std::vector<std::string>{"A", "B", "p"});
  CHECK(fs::exists(c.output_dir / "snapshot_2.csv"));

  const auto summary = nlohmann::json::parse(slurp(c.output_dir / "summary.json"));
  CHECK(std::abs(summary["final_mass"].get<double>() - 1.0) <= 1e-10);
  CHECK(summary["final_means"]["A"].get<double>() == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  CHECK(summary.contains("wall_time_s"));
  CHECK(summary["peak_states"].get<int>() >= 1);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path dir = scratch("determinism");
  RunConfig c;
  c.model = "toggle";
  c.solver.tf = 0.3;
  c.solver.checkpoint_times = {0.1, 0.3};
  std::ostringstream log;
  c.output_dir = dir / "a";
  REQUIRE(cmd_run(c, log) == kExitOk);
  c.output_dir = dir / "b";
  REQUIRE(cmd_run(c, log) == kExitOk);
  for (const char* f : {"trajectory.csv", "snapshot_0.1.csv", "snapshot_0.3.csv"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  auto sa = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  auto sb = nlohmann::json::parse(slurp(dir / "b" / "summary.json"));
  sa.erase("wall_time_s");
  sb.erase("wall_time_s");
  CHECK(sa.dump() == sb.dump());
}

TEST_CASE("validate on small models") {
  const fs::path dir = scratch("validate");
  std::ostringstream log;
  RunConfig c;
  c.model_file = two_state_model(dir);
  c.output_dir = dir / "two";
  c.solver.tf = 3.0;
  c.solver.checkpoint_times = {1.0};
  c.box = BoxSpec{{0, 0}, {1, 1}};
  REQUIRE(cmd_validate(c, log) == kExitOk);
  auto v = nlohmann::json::parse(slurp(c.output_dir / "validation.json"));
  CHECK(v["all_within_bound"].get<bool>());
  REQUIRE(v["checkpoints"].size() == 2);
  for (const auto& cp : v["checkpoints"]) CHECK(cp["l1_distance"].get<double>() <= 1e-9);

  RunConfig t;
  t.model = "toggle";
  t.output_dir = dir / "toggle";
  t.solver.tf = 0.05;
  t.solver.quantile_tol = 0.01;
  t.box = BoxSpec{{60, 0}, {110, 20}};
  REQUIRE(cmd_validate(t, log) == kExitOk);
  v = nlohmann::json::parse(slurp(t.output_dir / "validation.json"));
  for (const auto& cp : v["checkpoints"]) {
    CHECK(cp["l1_distance"].get<double>() <= cp["ledger_bound"].get<double>() + cp["oracle_error"].get<double>());
  }
}

TEST_CASE("exit codes and error records") {
  const fs::path dir = scratch("errors");
  std::ostringstream err;
  CHECK(guarded(dir, err, [] { return cmd_run(RunConfig{}, std::cerr); }) == kExitConfig);
  auto rec = nlohmann::json::parse(slurp(dir / "error.json"));
  CHECK(rec["error"]["kind"] == "config");
  CHECK(rec["exit_code"] == 2);
  CHECK(guarded(dir, err, []() -> int { throw SolverError("diverged"); }) == kExitSolver);
  CHECK(nlohmann::json::parse(slurp(dir / "error.json"))["error"]["kind"] == "solver");
  CHECK(guarded(dir, err, []() -> int { throw BoundViolation("l1 > bound"); }) == kExitBoundViolation);
  CHECK(guarded(dir / "missing", err, [] { return kExitOk; }) == kExitOk);

  RunConfig bad;
  bad.model = "toggle";
  bad.output_dir = dir;
  CHECK(guarded(dir, err, [&] { return cmd_validate(bad, err); }) == kExitConfig);
}

TEST_CASE("bench-assembly output") {
  const fs::path dir = scratch("bench");
  RunConfig c;
  c.model = "robertson";
  c.output_dir = dir;
  c.bench_sizes = {1, 40};
  c.bench_trials = 3;
  std::ostringstream log;
  REQUIRE(cmd_bench_assembly(c, log) == kExitOk);
  const auto b = nlohmann::json::parse(slurp(dir / "bench.json"));
  REQUIRE(b["results"].size() == 2);
  for (const auto& r : b["results"]) {
    const auto n = r["states"].get<std::size_t>();
    CHECK(n == r["requested_states"].get<std::size_t>());
    CHECK(r["forward"]["propensity_evaluations"].get<std::size_t>() == 3 * n);
    CHECK(r["identical"].get<bool>());
    CHECK(r["forward"]["median_s"].get<double>() >= 0.0);
  }
}

TEST_CASE("models listing") {
  std::ostringstream out;
  CHECK(cmd_models(out) == kExitOk);
  for (const char* name : {"bottleneck", "toggle", "oregonator", "robertson"}) {
    CHECK(out.str().find(name) != std::string::npos);
  }
}
