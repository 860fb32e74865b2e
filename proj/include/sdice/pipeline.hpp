#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdice/config.hpp"
#include "sdice/simulate.hpp"

namespace sdice {

inline constexpr std::string_view kVersion = "0.1.0";

/// Everything a run needs. Shock overrides are kept as text so that an
/// empty value means "use the scenario's own setting".
struct RunConfig {
  ModelParams model;
  std::string scenario = "A1";
  std::uint64_t seed = 42;
  int trajectories = 1000;
  int report_periods = 40;
  int workers = 1;
  bool svg = false;

  std::string shock_p_annual;
  std::string shock_chi;
  std::string shock_phi;
  std::string shock_persistent;
  std::string shock_forced_prefix;
  std::string shock_policy;  // stochastic | fixed

  GridSpec grid;
  RangeFactors ranges;
  SolverSettings solver;
  ReferenceSettings reference;
};

config::FieldList run_fields(RunConfig& cfg);

/// N = 40, 5 capital nodes, 3 for everything else, M = 200.
void apply_fast_mode(RunConfig& cfg);

/// Short CLI names: scenario, trajectories, seed, n-periods, report-periods.
std::string resolve_alias(std::string_view key);

/// Applies "key=value" assignments in order (aliases allowed).
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments);

/// Scenario preset with the shock overrides applied, validated.
ScenarioConfig resolve_scenario(const RunConfig& cfg);

void validate(const RunConfig& cfg);

/// Canonical INI text of the resolved configuration; hashed for the manifest.
std::string canonical_ini(const RunConfig& cfg);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// A failed pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct OutputFile {
  std::string path;  // relative to the run directory
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string version;
  std::string scenario;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<StageTiming> timings;
  std::vector<OutputFile> outputs;
};

using LogSink = std::function<void(std::string_view)>;

/// reference → grid → backward induction → simulation → bands → files.
/// Writes everything under `out_dir` plus manifest.json.
RunManifest run(const RunConfig& cfg, const std::filesystem::path& out_dir,
                const LogSink& log = {});

std::string manifest_json(const RunManifest& manifest);

/// Static SVG fan chart from a band CSV (t, q..., mean, q..., deterministic).
void render_fan_chart(const std::filesystem::path& band_file, std::string_view variable,
                      const std::filesystem::path& output);

/// Same, from CSV text.
std::string fan_chart_svg(std::istream& band_csv, std::string_view variable, int base_year,
                          double years_per_period);

}  // namespace sdice
