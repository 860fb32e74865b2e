#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sdice/reference.hpp"
#include "sdice/solver.hpp"

namespace sdice {

enum class PolicySource { stochastic_optimal, deterministic_fixed };

struct ScenarioConfig {
  std::string id = "deterministic";
  ShockSpec shock;
  PolicySource policy = PolicySource::stochastic_optimal;
  int trajectories = 1000;
  std::uint64_t seed = 42;
  /// I_0 = 0, I_1 = 1
  bool forced_prefix = false;

  void validate() const;
};

/// Named scenarios: A1, A2, B, C and the shock-free "deterministic" run.
ScenarioConfig scenario(std::string_view id);
std::span<const std::string_view> scenario_ids();

using RegimePath = std::vector<Regime>;

/// I_t for t = 0..periods per trajectory. Trajectory m draws from its own
/// mt19937_64 stream seeded by (seed, m), one uniform per period t >= 1 in
/// order, so paths do not depend on scheduling or on M.
std::vector<RegimePath> sample_regimes(const ScenarioConfig& config, const Matrix2& transition,
                                       int periods);

/// Re-optimize against the value tables at every realized state.
struct StochasticPolicy {
  const Solution* solution;
  SolverSettings settings;
};

/// Apply the reference (μ_t, s_t) whatever the realized state.
struct FixedPolicy {
  const ReferenceTrajectory* reference;
};

using Policy = std::variant<StochasticPolicy, FixedPolicy>;

/// Forward Monte Carlo. t = 0 controls always come from `reference`. The
/// policy must match config.policy.
std::vector<Trajectory> simulate_trajectories(const ScenarioConfig& config, const Policy& policy,
                                              const ReferenceTrajectory& reference,
                                              const Problem& problem,
                                              std::span<const RegimePath> regimes,
                                              unsigned workers = 1);

/// As above with regimes drawn by sample_regimes.
std::vector<Trajectory> simulate_trajectories(const ScenarioConfig& config, const Policy& policy,
                                              const ReferenceTrajectory& reference,
                                              const Problem& problem, unsigned workers = 1);

/// Hyndman-Fan type 7 quantile of sorted data.
double empirical_quantile(std::span<const double> sorted, double p);

struct QuantileBands {
  std::vector<double> probabilities;
  /// [variable][t]
  std::array<std::vector<double>, kAllVariables.size()> mean;
  /// [variable][probability][t]
  std::array<std::vector<std::vector<double>>, kAllVariables.size()> quantiles;

  int periods() const { return static_cast<int>(mean[0].size()) - 1; }
};

QuantileBands quantile_bands(std::span<const Trajectory> trajectories,
                             std::vector<double> probabilities = {0.025, 0.975});

/// "q025" for 0.025.
std::string quantile_label(double p);

/// Long format: scenario, trajectory, t, variable, value for t <= last_period.
void write_trajectories_csv(std::string_view scenario, std::span<const Trajectory> trajectories,
                            int last_period, std::ostream& out);

/// One variable: t, q..., mean, q..., deterministic for t <= last_period.
void write_band_csv(const QuantileBands& bands, Variable v, const Trajectory& deterministic,
                    int last_period, std::ostream& out);

}  // namespace sdice
