#include "sdice/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

namespace sdice {

namespace {

namespace fs = std::filesystem;

struct Alias {
  std::string_view name;
  std::string_view key;
};

constexpr Alias kAliases[] = {
    {"scenario", "run.scenario"},
    {"trajectories", "run.trajectories"},
    {"seed", "run.seed"},
    {"n-periods", "time.periods"},
    {"report-periods", "run.report_periods"},
};

std::optional<bool> parse_flag(std::string_view key, const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument(fmt::format("config key '{}': cannot parse '{}' as boolean", key, text));
}

std::optional<double> parse_real(std::string_view key, const std::string& text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument(fmt::format("config key '{}': cannot parse '{}' as number", key, text));
  return v;
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {}

  template <class Writer>
  void write(const std::string& relative, Writer&& writer) {
    const fs::path path = root_ / relative;
    fs::create_directories(path.parent_path());
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
      writer(out);
      if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
    }
    record(relative);
  }

  void record(const std::string& relative) {
    const fs::path path = root_ / relative;
    files_.push_back({relative, fs::file_size(path), sha256_file(path)});
  }

  const fs::path& root() const { return root_; }
  std::vector<OutputFile> files() const { return files_; }

 private:
  fs::path root_;
  std::vector<OutputFile> files_;
};

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

config::FieldList run_fields(RunConfig& c) {
  config::FieldList f = {
      {"run.scenario", &c.scenario},
      {"run.seed", &c.seed},
      {"run.trajectories", &c.trajectories},
      {"run.report_periods", &c.report_periods},
      {"run.workers", &c.workers},
      {"run.svg", &c.svg},
      {"shock.p_annual", &c.shock_p_annual},
      {"shock.chi", &c.shock_chi},
      {"shock.phi", &c.shock_phi},
      {"shock.persistent", &c.shock_persistent},
      {"shock.forced_prefix", &c.shock_forced_prefix},
      {"shock.policy", &c.shock_policy},
      {"grid.capital_nodes", &c.grid.capital_nodes},
      {"grid.other_nodes", &c.grid.other_nodes},
      {"grid.productivity_nodes", &c.grid.productivity_nodes},
      {"grid.extrapolate_capital", &c.grid.extrapolate_capital},
      {"grid.capital_lo", &c.ranges.capital_lo},
      {"grid.capital_hi", &c.ranges.capital_hi},
      {"grid.carbon_lo", &c.ranges.carbon_lo},
      {"grid.carbon_hi", &c.ranges.carbon_hi},
      {"grid.temperature_hi", &c.ranges.temperature_hi},
      {"grid.productivity_lo", &c.ranges.productivity_lo},
      {"grid.productivity_hi", &c.ranges.productivity_hi},
      {"solver.tolerance", &c.solver.tolerance},
      {"solver.max_sweeps", &c.solver.max_sweeps},
      {"solver.perturbation", &c.solver.perturbation},
      {"solver.fallback_scan", &c.solver.fallback_scan},
      {"reference.restarts", &c.reference.restarts},
      {"reference.tolerance", &c.reference.tolerance},
      {"reference.golden_tolerance", &c.reference.golden_tolerance},
      {"reference.perturbation", &c.reference.perturbation},
      {"reference.max_sweeps", &c.reference.max_sweeps},
      {"reference.seed", &c.reference.seed},
  };
  auto model = config::model_fields(c.model);
  f.insert(f.end(), model.begin(), model.end());
  return f;
}

void apply_fast_mode(RunConfig& cfg) {
  cfg.model.periods = 40;
  cfg.grid.capital_nodes = 5;
  cfg.grid.other_nodes = 3;
  cfg.grid.productivity_nodes = 3;
  cfg.trajectories = 200;
}

std::string resolve_alias(std::string_view key) {
  for (const auto& a : kAliases)
    if (a.name == key) return std::string(a.key);
  return std::string(key);
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments) {
  const auto fields = run_fields(cfg);
  for (const auto& a : assignments) {
    const auto [key, value] = config::split_assignment(a);
    config::set_field(fields, resolve_alias(key), value);
  }
}

ScenarioConfig resolve_scenario(const RunConfig& cfg) {
  ScenarioConfig s = scenario(cfg.scenario);
  s.seed = cfg.seed;
  s.trajectories = cfg.trajectories;
  if (auto v = parse_real("shock.p_annual", cfg.shock_p_annual)) s.shock.p_annual = *v;
  if (auto v = parse_real("shock.chi", cfg.shock_chi)) s.shock.chi = *v;
  if (auto v = parse_real("shock.phi", cfg.shock_phi)) s.shock.phi = *v;
  if (auto v = parse_flag("shock.persistent", cfg.shock_persistent)) s.shock.persistent = *v;
  if (auto v = parse_flag("shock.forced_prefix", cfg.shock_forced_prefix)) s.forced_prefix = *v;
  if (cfg.shock_policy == "stochastic") {
    s.policy = PolicySource::stochastic_optimal;
  } else if (cfg.shock_policy == "fixed") {
    s.policy = PolicySource::deterministic_fixed;
  } else if (!cfg.shock_policy.empty()) {
    throw std::invalid_argument(fmt::format("config key 'shock.policy': expected stochastic or fixed, got '{}'", cfg.shock_policy));
  }
  s.validate();
  return s;
}

void validate(const RunConfig& cfg) {
  cfg.model.validate();
  resolve_scenario(cfg);
  if (cfg.report_periods < 0) throw std::invalid_argument("config key 'run.report_periods' must be >= 0");
  if (cfg.workers < 1) throw std::invalid_argument("config key 'run.workers' must be >= 1");
  if (cfg.grid.capital_nodes < 2) throw std::invalid_argument("config key 'grid.capital_nodes' must be >= 2");
  if (cfg.grid.other_nodes < 2) throw std::invalid_argument("config key 'grid.other_nodes' must be >= 2");
  if (cfg.grid.productivity_nodes < 2) throw std::invalid_argument("config key 'grid.productivity_nodes' must be >= 2");
  if (cfg.reference.restarts < 1) throw std::invalid_argument("config key 'reference.restarts' must be >= 1");
  if (!(cfg.solver.tolerance > 0.0)) throw std::invalid_argument("config key 'solver.tolerance' must be positive");
  if (cfg.solver.max_sweeps < 1) throw std::invalid_argument("config key 'solver.max_sweeps' must be >= 1");
  if (cfg.solver.fallback_scan < 2) throw std::invalid_argument("config key 'solver.fallback_scan' must be >= 2");
}

std::string canonical_ini(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::ostringstream out;
  config::write_ini(run_fields(copy), out);
  return out.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

StageError::StageError(std::string stage, const std::string& what)
    : std::runtime_error(fmt::format("stage '{}' failed: {}", stage, what)), stage_(std::move(stage)) {}

RunManifest run(const RunConfig& cfg, const fs::path& out_dir, const LogSink& log) {
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  const ScenarioConfig sc = stage("config", [&] {
    validate(cfg);
    return resolve_scenario(cfg);
  });

  RunManifest manifest;
  manifest.version = std::string(kVersion);
  manifest.scenario = sc.id;
  const std::string ini = canonical_ini(cfg);
  manifest.config_hash = sha256_hex(ini);
  {
    RunConfig copy = cfg;
    const auto fields = run_fields(copy);
    for (const auto& [key, ref] : fields) manifest.parameters.emplace_back(key, config::get_field(fields, key));
  }

  OutputDir out(out_dir);
  Stopwatch clock;
  const ModelParams& params = cfg.model;
  const ExogenousPaths paths = build_exogenous_paths(params);
  const unsigned workers = static_cast<unsigned>(cfg.workers);
  const int last = std::min(cfg.report_periods, params.periods);

  say(fmt::format("reference: solving shock-free problem, N = {}", params.periods));
  ReferenceSettings rs = cfg.reference;
  rs.workers = workers;
  const ReferenceTrajectory ref = stage("reference", [&] { return solve_deterministic(params, rs); });
  if (!ref.diagnostics.converged) say("reference: warning: coordinate search did not converge");
  manifest.timings.push_back({"reference", clock.lap()});

  const Problem problem = make_problem(params, paths, sc.shock);
  std::optional<Solution> solution;
  if (sc.policy == PolicySource::stochastic_optimal) {
    solution = stage("solve", [&] {
      const Grid grid = build_grid(grid_ranges_from_reference(ref, paths, cfg.ranges), cfg.grid, sc.shock);
      say(fmt::format("solve: {} nodes per period, {} periods", grid.size(), params.periods));
      SolverSettings ss = cfg.solver;
      ss.workers = workers;
      return backward_induction(grid, problem, ss, [&](const PeriodDiagnostics& d) {
        if (d.t % 10 == 0)
          say(fmt::format("solve: t = {:>2}  {:.2f}s  fallbacks {}", d.t, d.seconds, d.fallbacks));
      });
    });
    manifest.timings.push_back({"solve", clock.lap()});
  }

  say(fmt::format("simulate: {} trajectories", sc.trajectories));
  const std::vector<Trajectory> trajectories = stage("simulate", [&] {
    Policy policy = FixedPolicy{&ref};
    if (solution) policy = StochasticPolicy{&*solution, cfg.solver};
    return simulate_trajectories(sc, policy, ref, problem, workers);
  });
  const QuantileBands bands = stage("bands", [&] { return quantile_bands(trajectories); });
  manifest.timings.push_back({"simulate", clock.lap()});

  stage("write", [&] {
    out.write("config.ini", [&](std::ostream& os) { os << ini; });
    out.write("reference.csv", [&](std::ostream& os) { write_reference_csv(ref, params, os); });
    out.write("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(sc.id, trajectories, last, os); });
    for (Variable v : kAllVariables) {
      const std::string file = fmt::format("bands/{}.csv", name(v));
      out.write(file, [&](std::ostream& os) { write_band_csv(bands, v, ref.path, last, os); });
      if (cfg.svg) {
        const std::string svg = fmt::format("svg/{}.svg", name(v));
        render_fan_chart(out.root() / file, name(v), out.root() / svg);
        out.record(svg);
      }
    }
    if (solution) {
      out.write("solver_diagnostics.csv", [&](std::ostream& os) {
        os << "t,nodes,fallbacks,mean_evaluations\n";
        for (const auto& d : solution->diagnostics)
          os << fmt::format("{},{},{},{:.1f}\n", d.t, d.nodes, d.fallbacks, d.mean_evaluations);
      });
    }
  });
  manifest.timings.push_back({"write", clock.lap()});
  manifest.outputs = out.files();

  std::ofstream json(out_dir / "manifest.json", std::ios::binary);
  json << manifest_json(manifest) << '\n';
  if (!json) throw StageError("write", "cannot write manifest.json");
  return manifest;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["version"] = m.version;
  j["scenario"] = m.scenario;
  j["config_hash"] = m.config_hash;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.parameters) params[k] = v;
  j["parameters"] = params;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& t : m.timings) timings[t.stage] = t.seconds;
  j["timings_seconds"] = timings;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& f : m.outputs) outputs.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  j["outputs"] = outputs;
  return j.dump(2);
}

}  // namespace sdice
