#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdice/grid.hpp"

namespace sdice {

/// V̂_t over the grid, one frozen array per period t = 0..N.
struct ValueTable {
  std::vector<std::vector<double>> period;
};

struct PolicyTable {
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<double>> consumption;
  std::vector<std::vector<double>> savings;
};

struct SolverSettings {
  double tolerance = 1e-8;
  int max_sweeps = 100;
  double perturbation = 1e-4;
  int fallback_scan = 17;
  unsigned workers = 1;
};

struct PeriodDiagnostics {
  int t = 0;
  std::size_t nodes = 0;
  std::size_t fallbacks = 0;
  double mean_evaluations = 0.0;
  double seconds = 0.0;
};

struct Solution {
  Grid grid;
  ValueTable values;
  PolicyTable policy;
  std::vector<PeriodDiagnostics> diagnostics;
};

/// A node failure during backward induction.
class SolverError : public std::runtime_error {
 public:
  SolverError(int t, std::size_t node, const std::string& what);
  int period() const { return period_; }
  std::size_t node() const { return node_; }

 private:
  int period_;
  std::size_t node_;
};

/// Everything a Bellman step needs about the problem.
struct Problem {
  const ModelParams& params;
  const ExogenousPaths& paths;
  const ShockSpec& shock;
  Matrix2 transition;
};

Problem make_problem(const ModelParams& params, const ExogenousPaths& paths,
                     const ShockSpec& shock);

/// Σ_{I'} Pr[I'|I] V̂_{t+1}(step_state(x, controls, I')), each term by
/// multilinear interpolation. `next_values` is V̂_{t+1}; an empty span means
/// the terminal V̂_N ≡ 0.
double expected_continuation(std::span<const double> next_values, const Grid& grid, int t,
                             const StateVector& state, const Controls& controls,
                             const Problem& problem);

/// E[V̂_{t+1} | I_t = i] per regime, as flat continuous-size tables. Built
/// once per period and shared read-only by all node evaluations.
class Continuation {
 public:
  Continuation(const Grid& grid, int t, std::span<const double> next_values,
               const Matrix2& transition);

  bool zero() const { return zero_; }
  int period() const { return t_; }
  const Grid& grid() const { return *grid_; }
  std::span<const double> blended(Regime current) const { return blended_[index(current)]; }

  /// Generic evaluation at a successor state (used for checks and tests).
  double value(const StateVector& next, Regime current) const;

 private:
  const Grid* grid_;
  int t_;
  bool zero_;
  std::vector<double> blended_[kRegimeCount];
};

struct NodePolicy {
  double mu = 0.0;
  double savings = 0.0;
  double consumption = 0.0;
  double value = 0.0;
  bool fallback = false;
  int evaluations = 0;
};

struct Seed {
  double mu;
  double savings;
};

/// Maximizes U(c, L_t) + e^{-ρ̃Δ} E[V̂_{t+1}] over the (μ, savings) box.
NodePolicy optimize_controls(const StateVector& state, int t, const Continuation& continuation,
                             const Problem& problem, const SolverSettings& settings,
                             std::optional<Seed> seed = std::nullopt);

/// U(c, L_t) + e^{-ρ̃Δ} E[V̂_{t+1}] at given controls, via the generic path.
double bellman_value(const StateVector& state, int t, const Controls& controls,
                     const Continuation& continuation, const Problem& problem);

using ProgressCallback = std::function<void(const PeriodDiagnostics&)>;

/// Backward value-function iteration from V̂_N ≡ 0 down to t = 0.
Solution backward_induction(Grid grid, const Problem& problem, const SolverSettings& settings,
                            const ProgressCallback& progress = {});

/// V̂_t at an arbitrary state by multilinear interpolation.
double value_at(const Solution& solution, int t, const StateVector& state);

/// CSV: t, regime, node, one column per grid dimension, V, MIU, C, S.
void write_tables_csv(const Solution& solution, const ExogenousPaths& paths, std::ostream& out);

}  // namespace sdice
