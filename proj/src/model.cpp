#include "sdice/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sdice {

ExogenousPaths build_exogenous_paths(const ModelParams& params) {
  params.validate();
  const int n = params.periods;
  const double dt = params.years_per_period;
  const auto len = static_cast<std::size_t>(n) + 1;

  ExogenousPaths p;
  p.population.resize(len);
  p.productivity.resize(len);
  p.productivity_growth.resize(len);
  p.sigma.resize(len);
  p.land_emissions.resize(len);
  p.other_forcing.resize(len);
  p.backstop.resize(len);

  p.population[0] = params.population0;
  p.productivity[0] = params.productivity0;
  p.sigma[0] = params.sigma0();
  double g_sigma = params.sigma_growth0;

  for (std::size_t t = 0; t < len; ++t) {
    const double td = static_cast<double>(t);
    const double ga = params.productivity_growth0 * std::exp(-params.productivity_decline * dt * td);
    p.productivity_growth[t] = ga / (1.0 - ga);
    p.land_emissions[t] = params.land_emissions0 * std::pow(1.0 - params.land_emissions_decline, td);
    p.other_forcing[t] =
        static_cast<int>(t) < params.other_forcing_periods
            ? params.other_forcing_start +
                  (params.other_forcing_end - params.other_forcing_start) * td /
                      params.other_forcing_periods
            : params.other_forcing_end;
    p.backstop[t] = params.backstop_price * std::pow(1.0 - params.backstop_decline, td);

    if (t + 1 < len) {
      const double l = p.population[t];
      p.population[t + 1] = l * std::pow(params.population_asymptote / l, params.population_adjustment);
      p.productivity[t + 1] = p.productivity[t] * (1.0 + p.productivity_growth[t]);
      p.sigma[t + 1] = p.sigma[t] * std::exp(g_sigma * dt);
      g_sigma *= std::pow(1.0 - params.sigma_decline, dt);
    }
  }
  return p;
}

StateVector initial_state(const ModelParams& params, const ExogenousPaths& paths) {
  StateVector s;
  s.productivity = paths.productivity.at(0);
  s.capital = params.capital0;
  s.carbon = params.carbon0;
  s.temperature = params.temperature0;
  s.regime = Regime::normal;
  return s;
}

double utility(double consumption, double population, const ModelParams& params) {
  if (!(consumption > 0.0)) throw std::domain_error("utility: consumption must be > 0");
  if (!(population > 0.0)) throw std::domain_error("utility: population must be > 0");
  const double per_capita = consumption / population;
  const double alpha = params.risk_aversion;
  if (alpha == 1.0) return params.years_per_period * population * std::log(per_capita);
  return params.years_per_period * population / (1.0 - alpha) *
         (std::pow(per_capita, 1.0 - alpha) - 1.0);
}

double gross_output(double productivity, double capital, double population, double chi,
                    const ModelParams& params) {
  if (!(productivity > 0.0) || !(capital > 0.0) || !(population > 0.0))
    throw std::domain_error("gross_output: A, K and L must be > 0");
  if (!(chi >= 0.0 && chi < 1.0)) throw std::domain_error("gross_output: chi must lie in [0, 1)");
  const double g = params.capital_share;
  return (1.0 - chi) * productivity * std::pow(capital, g) * std::pow(population, 1.0 - g);
}

double damage_abatement_factor(double mu, double sigma, double tat, int t,
                               const ModelParams& params) {
  const double backstop = params.backstop_price * std::pow(1.0 - params.backstop_decline, t);
  const double theta2 = params.abatement_exponent;
  return 1.0 - sigma * backstop * std::pow(mu, theta2) / (1000.0 * theta2) -
         params.damage_coefficient * tat * tat;
}

double effective_productivity(const StateVector& state, int t, const ExogenousPaths& paths,
                              const ShockSpec& shock) {
  return shock.persistent ? state.productivity : paths.productivity.at(t);
}

double state_gross_output(const StateVector& state, int t, const ExogenousPaths& paths,
                          const ModelParams& params, const ShockSpec& shock) {
  const double chi = state.regime == Regime::stressed ? shock.chi : 0.0;
  return gross_output(effective_productivity(state, t, paths, shock), state.capital,
                      paths.population.at(t), chi, params);
}

double net_output(const StateVector& state, double mu, int t, const ExogenousPaths& paths,
                  const ModelParams& params, const ShockSpec& shock) {
  const double y = state_gross_output(state, t, paths, params, shock);
  const double omega = damage_abatement_factor(mu, paths.sigma.at(t), state.tat(), t, params);
  return std::max(omega * y, kMinNetOutput);
}

double emissions(const StateVector& state, double mu, int t, const ExogenousPaths& paths,
                 const ModelParams& params, const ShockSpec& shock) {
  const double y = state_gross_output(state, t, paths, params, shock);
  return (1.0 - mu) * paths.sigma.at(t) * y + paths.land_emissions.at(t);
}

double radiative_forcing(double mat, int t, const ExogenousPaths& paths,
                         const ModelParams& params) {
  if (!(mat > 0.0)) throw std::domain_error("radiative_forcing: M_AT must be > 0");
  return params.forcing_per_doubling * std::log2(mat / params.carbon_eq_at) +
         paths.other_forcing.at(t);
}

double carbon_price(double mu, int t, const ModelParams& params) {
  if (mu <= 0.0) return 0.0;
  return params.backstop_price * std::pow(1.0 - params.backstop_decline, t) *
         std::pow(mu, params.abatement_exponent - 1.0);
}

StateVector step_state(const StateVector& state, const Controls& controls, Regime next,
                       int t, const ExogenousPaths& paths, const ModelParams& params,
                       const ShockSpec& shock) {
  const double dt = params.years_per_period;
  const double q = net_output(state, controls.mu, t, paths, params, shock);
  const double e = emissions(state, controls.mu, t, paths, params, shock);
  const double f = radiative_forcing(state.mat(), t, paths, params);
  const auto phi_m = params.carbon_matrix();
  const auto phi_t = params.temperature_matrix();

  StateVector out;
  out.regime = next;
  out.capital =
      std::max(state.capital * params.capital_retention() + dt * (q - controls.consumption),
               kMinCapital);

  const auto& m = state.carbon;
  for (int i = 0; i < 3; ++i)
    out.carbon[i] = phi_m[i][0] * m[0] + phi_m[i][1] * m[1] + phi_m[i][2] * m[2];
  out.carbon[0] += dt * params.emission_to_carbon() * e;

  const auto& temp = state.temperature;
  out.temperature[0] = phi_t[0][0] * temp[0] + phi_t[0][1] * temp[1] + params.xi1 * f;
  out.temperature[1] = phi_t[1][0] * temp[0] + phi_t[1][1] * temp[1];

  if (shock.persistent) {
    const double phi = state.regime == Regime::stressed ? shock.phi : 0.0;
    out.productivity = state.productivity * (1.0 + paths.productivity_growth.at(t)) * (1.0 - phi);
  } else {
    out.productivity = paths.productivity.at(t + 1);
  }

  const bool ok = std::isfinite(out.capital) && std::isfinite(out.productivity) &&
                  std::isfinite(out.carbon[0]) && std::isfinite(out.carbon[1]) &&
                  std::isfinite(out.carbon[2]) && std::isfinite(out.temperature[0]) &&
                  std::isfinite(out.temperature[1]);
  if (!ok) throw std::domain_error("step_state: non-finite state at t=" + std::to_string(t));
  return out;
}

}  // namespace sdice
