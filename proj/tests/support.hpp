#pragma once

#include <algorithm>
#include <vector>

#include "sdice/reference.hpp"
#include "sdice/solver.hpp"

namespace sdice::test {

/// Cheap stand-in for the reference solve: a fixed μ ramp and a 25% savings
/// rate replayed through the model.
inline ReferenceTrajectory synthetic_reference(const ModelParams& params, const ExogenousPaths& paths) {
  const int n = params.periods;
  ReferenceTrajectory ref;
  ref.mu.resize(n + 1);
  ref.savings_rate.assign(n + 1, 0.25);
  for (int t = 0; t <= n; ++t) ref.mu[t] = std::min(1.0, 0.03 + 0.03 * t);
  ref.path = replay_savings_controls(initial_state(params, paths), ref.mu, ref.savings_rate, {}, paths,
                                     params, ShockSpec{});
  ref.objective = discounted_utility(ref.path, paths, params);
  return ref;
}

/// A small solved problem shared by several tests.
struct SmallProblem {
  ModelParams params;
  ExogenousPaths paths;
  ShockSpec shock;
  ReferenceTrajectory ref;
  Problem problem;
  Solution solution;

  SmallProblem(int periods, ShockSpec s, GridSpec spec = {3, 2, 3}, unsigned workers = 1)
      : params(make_params(periods)),
        paths(build_exogenous_paths(params)),
        shock(s),
        ref(synthetic_reference(params, paths)),
        problem(make_problem(params, paths, shock)),
        solution(solve(spec, workers)) {}

  SmallProblem(const SmallProblem&) = delete;

 private:
  static ModelParams make_params(int periods) {
    ModelParams p;
    p.periods = periods;
    return p;
  }

  Solution solve(const GridSpec& spec, unsigned workers) {
    SolverSettings settings;
    settings.workers = workers;
    return backward_induction(build_grid(grid_ranges_from_reference(ref, paths), spec, shock), problem,
                              settings);
  }
};

}  // namespace sdice::test
