#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sdice/pipeline.hpp"

namespace {

int run_command(const std::string& config_path, bool fast, const std::vector<std::string>& sets,
                const std::vector<std::string>& positional, const std::optional<std::string>& scenario,
                const std::optional<std::uint64_t>& seed, const std::optional<int>& trajectories,
                const std::optional<int>& workers, bool svg, bool quiet, const std::string& out) {
  sdice::RunConfig cfg;
  try {
    if (fast) sdice::apply_fast_mode(cfg);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument(fmt::format("cannot read config file {}", config_path));
      sdice::config::read_ini(sdice::run_fields(cfg), in);
    }
    sdice::apply_overrides(cfg, positional);
    sdice::apply_overrides(cfg, sets);
    if (scenario) cfg.scenario = *scenario;
    if (seed) cfg.seed = *seed;
    if (trajectories) cfg.trajectories = *trajectories;
    if (workers) cfg.workers = *workers;
    if (svg) cfg.svg = true;
    sdice::validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    sdice::LogSink log;
    if (!quiet) log = [](std::string_view msg) { std::cerr << msg << '\n'; };
    const auto manifest = sdice::run(cfg, out, log);
    if (!quiet) {
      for (const auto& t : manifest.timings) std::cerr << fmt::format("{:<10} {:8.2f}s\n", t.stage, t.seconds);
      std::cerr << fmt::format("wrote {} files to {}\n", manifest.outputs.size() + 1, out);
    }
  } catch (const sdice::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic DICE: value-function iteration with regime shocks"};
  app.set_help_all_flag("--help-all", "print help for all subcommands");

  std::string config_path, out = "out";
  bool fast = false, svg = false, quiet = false;
  std::vector<std::string> sets, positional;
  std::optional<std::string> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> trajectories, workers;

  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario, "A1, A2, B, C or deterministic");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--trajectories", trajectories, "number of simulated trajectories");
  app.add_option("--workers", workers, "worker threads");
  app.add_flag("--fast", fast, "reduced resolution: N=40, 5 K nodes, 3 others, 200 trajectories");
  app.add_option("--out", out, "output directory");
  app.add_flag("--svg", svg, "also render fan charts");
  app.add_flag("--quiet,-q", quiet, "no progress output");
  app.add_option("--set", sets, "override, section.key=value (repeatable)");
  app.add_option("assignments", positional, "[run] key=value overrides (scenario, trajectories, seed, n-periods, report-periods or section.key)");

  auto* render = app.add_subcommand("render", "render a fan chart from a band CSV");
  std::string band_file, variable, svg_out;
  render->add_option("band", band_file, "band CSV")->required()->check(CLI::ExistingFile);
  render->add_option("variable", variable, "variable name, e.g. TATM")->required();
  render->add_option("output", svg_out, "SVG path")->required();

  auto* defaults = app.add_subcommand("defaults", "print the default configuration");
  bool defaults_fast = false;
  defaults->add_flag("--fast", defaults_fast, "reduced-resolution defaults");

  CLI11_PARSE(app, argc, argv);

  if (*render) {
    try {
      sdice::render_fan_chart(band_file, variable, svg_out);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return 0;
  }
  if (*defaults) {
    sdice::RunConfig cfg;
    if (defaults_fast) sdice::apply_fast_mode(cfg);
    std::cout << sdice::canonical_ini(cfg);
    return 0;
  }
  if (!positional.empty() && positional.front() == "run") positional.erase(positional.begin());
  return run_command(config_path, fast, sets, positional, scenario, seed, trajectories, workers, svg, quiet, out);
}
