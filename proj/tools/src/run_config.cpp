#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fluxfsp/error.hpp"
#include "fluxfsp/model_io.hpp"

namespace fluxfsp::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::string_view where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_solver(const json& j, SolverConfig& s) {
  check_keys(j, "solver",
             {"quantile_tol", "flux_tol", "dt_tol", "ode_tol", "dt_min", "dt_max",
              "expansion_radius", "t0", "tf", "prune_every", "checkpoints", "max_krylov_dim"});
  read(j, "quantile_tol", s.quantile_tol);
  read(j, "flux_tol", s.flux_tol);
  read(j, "dt_tol", s.dt_tol);
  read(j, "ode_tol", s.ode_tol);
  read(j, "dt_min", s.dt_min);
  read(j, "dt_max", s.dt_max);
  read(j, "expansion_radius", s.expansion_radius);
  read(j, "t0", s.t0);
  read(j, "tf", s.tf);
  read(j, "prune_every", s.prune_every);
  read(j, "checkpoints", s.checkpoint_times);
  read(j, "max_krylov_dim", s.max_krylov_dim);
}

}  // namespace

void RunConfig::validate() const {
  if (model.has_value() == model_file.has_value()) {
    throw ConfigError("specify exactly one of a built-in model name or a model file");
  }
  if (!(toggle_eta > 0.0)) throw ConfigError("toggle_eta must be > 0");
  solver.validate();
  if (bench_trials < 1) throw ConfigError("bench trials must be >= 1");
  if (!(reference.tol > 0.0 && reference.tol < 1.0)) {
    throw ConfigError("reference tol must lie in (0, 1)");
  }
}

ReferenceMethod parse_reference_method(std::string_view name) {
  if (name == "auto") return ReferenceMethod::Auto;
  if (name == "dense") return ReferenceMethod::Dense;
  if (name == "krylov") return ReferenceMethod::Krylov;
  if (name == "uniformization") return ReferenceMethod::Uniformization;
  throw ConfigError("unknown reference method '" + std::string(name) + "'");
}

RunConfig parse_run_config(std::string_view json_text) {
  RunConfig c;
  try {
    const json j = json::parse(json_text);
    check_keys(j, "config",
               {"model", "model_file", "toggle_eta", "output", "snapshots", "solver", "box",
                "reference", "bench"});
    read(j, "model", c.model);
    if (j.contains("model_file")) c.model_file = j.at("model_file").get<std::string>();
    read(j, "toggle_eta", c.toggle_eta);
    if (j.contains("output")) c.output_dir = j.at("output").get<std::string>();
    read(j, "snapshots", c.write_snapshots);
    if (j.contains("solver")) read_solver(j.at("solver"), c.solver);
    if (j.contains("box")) {
      const json& b = j.at("box");
      check_keys(b, "box", {"lower", "upper", "max_states"});
      BoxSpec box;
      box.lower = b.at("lower").get<std::vector<Count>>();
      box.upper = b.at("upper").get<std::vector<Count>>();
      read(b, "max_states", box.max_states);
      c.box = std::move(box);
    }
    if (j.contains("reference")) {
      const json& r = j.at("reference");
      check_keys(r, "reference", {"tol", "method", "max_krylov_dim"});
      read(r, "tol", c.reference.tol);
      read(r, "max_krylov_dim", c.reference.max_krylov_dim);
      if (r.contains("method")) c.reference.method = parse_reference_method(r.at("method").get<std::string>());
    }
    if (j.contains("bench")) {
      const json& b = j.at("bench");
      check_keys(b, "bench", {"sizes", "trials"});
      read(b, "sizes", c.bench_sizes);
      read(b, "trials", c.bench_trials);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

Model resolve_model(const RunConfig& config) {
  if (config.model) {
    BuiltinOptions opts;
    opts.toggle_eta = config.toggle_eta;
    return builtin_model(*config.model, opts);
  }
  if (config.model_file) return load_model(*config.model_file);
  throw ConfigError("no model given");
}

}  // namespace fluxfsp::cli
