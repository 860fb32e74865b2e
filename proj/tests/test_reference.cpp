#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sdice/reference.hpp"

using namespace sdice;
using doctest::Approx;

namespace {

struct ReferenceFixture {
  ModelParams params = [] {
    ModelParams p;
    p.periods = 12;
    return p;
  }();
  ExogenousPaths paths = build_exogenous_paths(params);
  ReferenceSettings settings = [] {
    ReferenceSettings s;
    s.restarts = 2;
    return s;
  }();
  ReferenceTrajectory ref = solve_deterministic(params, settings);
};

}  // namespace

TEST_CASE_FIXTURE(ReferenceFixture, "reference controls respect the bounds") {
  const auto& b = params.controls;
  CHECK(ref.diagnostics.converged);
  CHECK(ref.mu[0] == 0.03);
  for (int t = 0; t <= params.periods; ++t) {
    CHECK(ref.mu[t] >= b.mu_lower(t));
    CHECK(ref.mu[t] <= b.mu_upper(t));
    CHECK(ref.savings_rate[t] >= 0.05);
    CHECK(ref.savings_rate[t] <= 0.60);
  }
}

TEST_CASE_FIXTURE(ReferenceFixture, "stored states replay exactly") {
  const auto replay = replay_savings_controls(initial_state(params, paths), ref.mu, ref.savings_rate, {}, paths,
                                              params, ShockSpec{});
  CHECK(replay.states == ref.path.states);
  CHECK(replay.controls == ref.path.controls);
  CHECK(discounted_utility(ref.path, paths, params) == ref.objective);
  CHECK(reference_objective(params, paths, ref.mu, ref.savings_rate) == ref.objective);
}

TEST_CASE_FIXTURE(ReferenceFixture, "initial gross output") {
  CHECK(ref.path.gross_output[0] == Approx(105.177).epsilon(1e-4));
  CHECK(std::abs(ref.path.gross_output[0] - 105.2) < 0.5);
}

TEST_CASE_FIXTURE(ReferenceFixture, "objective dominates the minimum controls") {
  const int n = params.periods;
  std::vector<double> mu(n + 1), s(n + 1, 0.05);
  for (int t = 0; t <= n; ++t) mu[t] = params.controls.mu_lower(t);
  CHECK(ref.objective >= reference_objective(params, paths, mu, s));
}

TEST_CASE_FIXTURE(ReferenceFixture, "no single-coordinate step of 1e-4 improves the objective") {
  const auto& b = params.controls;
  const double slack = 1e-10 * std::abs(ref.objective);
  for (int t = 0; t < params.periods; ++t)
    for (double h : {-1e-4, 1e-4}) {
      auto mu = ref.mu;
      mu[t] = std::clamp(mu[t] + h, b.mu_lower(t), b.mu_upper(t));
      CHECK(reference_objective(params, paths, mu, ref.savings_rate) <= ref.objective + slack);
      auto s = ref.savings_rate;
      s[t] = std::clamp(s[t] + h, b.savings_min, b.savings_max);
      CHECK(reference_objective(params, paths, ref.mu, s) <= ref.objective + slack);
    }
}

TEST_CASE_FIXTURE(ReferenceFixture, "objective is stable across restart seeds") {
  ReferenceSettings other = settings;
  other.seed = 7;
  const auto again = solve_deterministic(params, other);
  CHECK(std::abs(again.objective - ref.objective) <= 1e-6 * std::abs(ref.objective));
}

TEST_CASE_FIXTURE(ReferenceFixture, "restarts are reproducible") {
  const auto again = solve_deterministic(params, settings);
  CHECK(again.objective == ref.objective);
  CHECK(again.mu == ref.mu);
  CHECK(again.diagnostics.restart_objectives == ref.diagnostics.restart_objectives);
}

TEST_CASE_FIXTURE(ReferenceFixture, "reference CSV") {
  std::ostringstream out;
  write_reference_csv(ref, params, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,year,MIU,S,K,YNET,TATM,TOCEAN,CPRICE,DAMFCT,MAT,MU,ML");
  std::getline(in, line);
  CHECK(line.rfind("0,2015,0.03,", 0) == 0);
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == params.periods + 1);
}

TEST_CASE_FIXTURE(ReferenceFixture, "derived series") {
  const auto& tr = ref.path;
  for (int t = 0; t <= params.periods; ++t) {
    CHECK(tr.savings[t] == Approx(1.0 - tr.controls[t].consumption / tr.net_output[t]).epsilon(1e-12));
    CHECK(tr.damage_fraction[t] == Approx(0.00236 * tr.states[t].tat() * tr.states[t].tat()).epsilon(1e-14));
    CHECK(tr.carbon_price[t] == Approx(carbon_price(ref.mu[t], t, params)).epsilon(1e-14));
    CHECK(value_at(tr, Variable::MIU, t) == ref.mu[t]);
  }
}

TEST_CASE("derived output conventions") {
  ModelParams params;
  params.periods = 2;
  const auto paths = build_exogenous_paths(params);
  const std::vector<double> mu{1.0, 0.5, 0.0}, s{0.0, 0.2, 0.05};
  const auto tr = replay_savings_controls(initial_state(params, paths), mu, s, {}, paths, params, ShockSpec{});
  CHECK(tr.savings[0] == Approx(0.0).epsilon(1e-15));
  CHECK(tr.carbon_price[0] == 550.0);
  Trajectory hot = tr;
  hot.states[1].temperature[0] = 2.0;
  derived_outputs(hot, paths, params, ShockSpec{});
  CHECK(hot.damage_fraction[1] == Approx(0.00944).epsilon(1e-15));
}

TEST_CASE("grid ranges reject degenerate boxes") {
  ModelParams params;
  params.periods = 3;
  params.temperature0 = {0.0, 0.0};
  params.carbon0 = {588.0, 360.0, 1720.0};
  const auto paths = build_exogenous_paths(params);
  ReferenceTrajectory ref;
  ref.mu.assign(4, 0.0);
  ref.savings_rate.assign(4, 0.2);
  ref.path = replay_savings_controls(initial_state(params, paths), ref.mu, ref.savings_rate, {}, paths, params,
                                     ShockSpec{});
  RangeFactors f;
  f.capital_lo = f.capital_hi = 1.0;
  CHECK_THROWS_AS(grid_ranges_from_reference(ref, paths, f), std::invalid_argument);
}
