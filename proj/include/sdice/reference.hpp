#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sdice/trajectory.hpp"

namespace sdice {

struct ReferenceSettings {
  int restarts = 5;
  double tolerance = 1e-8;      // relative objective change per sweep
  double golden_tolerance = 1e-9;
  double perturbation = 1e-4;   // local-optimality probe
  int max_sweeps = 20000;
  std::uint64_t seed = 20160919;
  unsigned workers = 1;
};

struct ReferenceDiagnostics {
  bool converged = false;
  int best_restart = -1;
  int sweeps = 0;
  long long evaluations = 0;
  double last_improvement = 0.0;
  std::vector<double> restart_objectives;
};

/// Shock-free DICE-2016 optimum over the 2N controls (μ_t, s_t).
struct ReferenceTrajectory {
  Trajectory path;
  std::vector<double> mu;
  std::vector<double> savings_rate;
  double objective = 0.0;
  ReferenceDiagnostics diagnostics;
};

/// Multi-start coordinate-wise golden-section ascent. Non-convergence is
/// reported through `diagnostics.converged`; the best trajectory found is
/// always returned.
ReferenceTrajectory solve_deterministic(const ModelParams& params,
                                        const ReferenceSettings& settings = {});

/// Objective of an arbitrary control vector (no shocks).
double reference_objective(const ModelParams& params, const ExogenousPaths& paths,
                           const std::vector<double>& mu, const std::vector<double>& savings);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Box for each continuous state dimension at one period.
struct PeriodRanges {
  Range productivity;
  Range capital;
  std::array<Range, 3> carbon;
  std::array<Range, 2> temperature;
};

struct RangeFactors {
  double capital_lo = 0.6, capital_hi = 1.4;
  double carbon_lo = 0.6, carbon_hi = 1.4;
  double temperature_hi = 1.4;
  double productivity_lo = 0.6, productivity_hi = 1.0;
};

/// Per-period grid boxes around the reference path: K in [0.6K̃_t, 1.4K̃_t],
/// T in [0, 1.4 max T̃], M in [0.6 min M̃, 1.4 max M̃], A in [0.6Ã_t, Ã_t].
std::vector<PeriodRanges> grid_ranges_from_reference(const ReferenceTrajectory& ref,
                                                     const ExogenousPaths& paths,
                                                     const RangeFactors& factors = {});

/// One row per period; columns t, year, MIU, S, K, YNET, TATM, TOCEAN,
/// CPRICE, DAMFCT, MAT, MU, ML.
void write_reference_csv(const ReferenceTrajectory& ref, const ModelParams& params,
                         std::ostream& out);

}  // namespace sdice
