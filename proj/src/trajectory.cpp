#include "sdice/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdice {

namespace {

constexpr std::array<std::string_view, 11> kNames{"MIU",    "S",      "K",   "YNET",
                                                  "TATM",   "TOCEAN", "CPRICE", "DAMFCT",
                                                  "MAT",    "MU",     "ML"};

}  // namespace

std::string_view name(Variable v) { return kNames[static_cast<std::size_t>(v)]; }

std::optional<Variable> parse_variable(std::string_view n) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == n) return static_cast<Variable>(i);
  return std::nullopt;
}

double value_at(const Trajectory& traj, Variable v, int t) {
  const auto i = static_cast<std::size_t>(t);
  const auto& s = traj.states.at(i);
  switch (v) {
    case Variable::MIU: return traj.controls.at(i).mu;
    case Variable::S: return traj.savings.at(i);
    case Variable::K: return s.capital;
    case Variable::YNET: return traj.net_output.at(i);
    case Variable::TATM: return s.temperature[0];
    case Variable::TOCEAN: return s.temperature[1];
    case Variable::CPRICE: return traj.carbon_price.at(i);
    case Variable::DAMFCT: return traj.damage_fraction.at(i);
    case Variable::MAT: return s.carbon[0];
    case Variable::MU: return s.carbon[1];
    case Variable::ML: return s.carbon[2];
  }
  throw std::invalid_argument("value_at: unknown variable");
}

void derived_outputs(Trajectory& traj, const ExogenousPaths& paths, const ModelParams& params,
                     const ShockSpec& shock) {
  const std::size_t n = traj.states.size();
  if (traj.controls.size() != n) throw std::invalid_argument("derived_outputs: controls/states length mismatch");
  traj.savings.resize(n);
  traj.gross_output.resize(n);
  traj.net_output.resize(n);
  traj.emissions.resize(n);
  traj.forcing.resize(n);
  traj.carbon_price.resize(n);
  traj.damage_fraction.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int t = static_cast<int>(i);
    const auto& s = traj.states[i];
    const auto& c = traj.controls[i];
    const double q = net_output(s, c.mu, t, paths, params, shock);
    traj.gross_output[i] = state_gross_output(s, t, paths, params, shock);
    traj.net_output[i] = q;
    traj.savings[i] = 1.0 - c.consumption / q;
    traj.emissions[i] = emissions(s, c.mu, t, paths, params, shock);
    traj.forcing[i] = radiative_forcing(s.mat(), t, paths, params);
    traj.carbon_price[i] = carbon_price(c.mu, t, params);
    traj.damage_fraction[i] = params.damage_coefficient * s.tat() * s.tat();
  }
}

Controls terminal_controls(const StateVector& state, int t, const ExogenousPaths& paths,
                           const ModelParams& params, const ShockSpec& shock) {
  const double mu = params.controls.mu_lower(t);
  const double q = net_output(state, mu, t, paths, params, shock);
  return {mu, consumption_from_savings(q, params.controls.savings_min)};
}

Trajectory replay_savings_controls(const StateVector& start, std::span<const double> mu,
                                   std::span<const double> savings,
                                   std::span<const Regime> regimes, const ExogenousPaths& paths,
                                   const ModelParams& params, const ShockSpec& shock) {
  const int n = paths.periods();
  if (static_cast<int>(mu.size()) < n || static_cast<int>(savings.size()) < n)
    throw std::invalid_argument("replay: need one control per period");
  if (!regimes.empty() && static_cast<int>(regimes.size()) < n + 1)
    throw std::invalid_argument("replay: need one regime per period");

  auto regime_at = [&](int t) { return regimes.empty() ? Regime::normal : regimes[t]; };

  Trajectory traj;
  traj.states.reserve(n + 1);
  traj.controls.reserve(n + 1);
  StateVector s = start;
  s.regime = regime_at(0);
  for (int t = 0; t < n; ++t) {
    const double q = net_output(s, mu[t], t, paths, params, shock);
    const Controls c{mu[t], consumption_from_savings(q, savings[t])};
    traj.states.push_back(s);
    traj.controls.push_back(c);
    s = step_state(s, c, regime_at(t + 1), t, paths, params, shock);
  }
  traj.states.push_back(s);
  traj.controls.push_back(terminal_controls(s, n, paths, params, shock));
  derived_outputs(traj, paths, params, shock);
  // report the applied rate rather than 1 - c/Q, which can differ in the last bit
  std::copy_n(savings.begin(), n, traj.savings.begin());
  traj.savings[n] = params.controls.savings_min;
  return traj;
}

double discounted_utility(const Trajectory& traj, const ExogenousPaths& paths,
                          const ModelParams& params) {
  const double beta = params.discount_factor();
  double weight = 1.0;
  double total = 0.0;
  for (int t = 0; t < traj.periods(); ++t) {
    total += weight * utility(traj.controls[t].consumption, paths.population[t], params);
    weight *= beta;
  }
  return total;
}

}  // namespace sdice
