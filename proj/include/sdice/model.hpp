#pragma once

#include <array>
#include <vector>

#include "sdice/params.hpp"

namespace sdice {

/// Economy/climate state at the start of a period. `productivity` is only a
/// true state in persistent-shock configurations; otherwise it mirrors the
/// exogenous baseline path.
struct StateVector {
  double productivity = 0.0;
  double capital = 0.0;
  std::array<double, 3> carbon{};       // M_AT, M_UP, M_LO (GtC)
  std::array<double, 2> temperature{};  // T_AT, T_LO (°C above 1900)
  Regime regime = Regime::normal;

  double mat() const { return carbon[0]; }
  double tat() const { return temperature[0]; }

  bool operator==(const StateVector&) const = default;
};

struct Controls {
  double mu = 0.0;
  double consumption = 0.0;

  bool operator==(const Controls&) const = default;
};

/// Deterministic sequences indexed by period t = 0..N.
struct ExogenousPaths {
  std::vector<double> population;
  std::vector<double> productivity;
  std::vector<double> productivity_growth;  // g_A(t): A_{t+1} = A_t (1 + g_A(t))
  std::vector<double> sigma;
  std::vector<double> land_emissions;
  std::vector<double> other_forcing;
  std::vector<double> backstop;  // 550 (1 - 0.025)^t

  int periods() const { return static_cast<int>(population.size()) - 1; }
};

inline constexpr double kMinNetOutput = 1e-6;
inline constexpr double kMinCapital = 1e-6;

ExogenousPaths build_exogenous_paths(const ModelParams& params);

/// The state at t = 0 from the calibration.
StateVector initial_state(const ModelParams& params, const ExogenousPaths& paths);

/// Δ·L/(1-α)·((c/L)^{1-α} - 1), with the log limit at α = 1.
double utility(double consumption, double population, const ModelParams& params);

/// (1 - χ) A K^γ L^{1-γ}
double gross_output(double productivity, double capital, double population, double chi,
                    const ModelParams& params);

/// Ω = 1 - θ1(t) μ^θ2 - π2 T_AT². May be negative at extreme corners.
double damage_abatement_factor(double mu, double sigma, double tat, int t,
                               const ModelParams& params);

double net_output(const StateVector& state, double mu, int t, const ExogenousPaths& paths,
                  const ModelParams& params, const ShockSpec& shock);

double emissions(const StateVector& state, double mu, int t, const ExogenousPaths& paths,
                 const ModelParams& params, const ShockSpec& shock);

double radiative_forcing(double mat, int t, const ExogenousPaths& paths,
                         const ModelParams& params);

double carbon_price(double mu, int t, const ModelParams& params);

/// Productivity used by the production function at this state.
double effective_productivity(const StateVector& state, int t, const ExogenousPaths& paths,
                              const ShockSpec& shock);

/// Gross output at the state with the regime's shock applied.
double state_gross_output(const StateVector& state, int t, const ExogenousPaths& paths,
                          const ModelParams& params, const ShockSpec& shock);

/// One period of the deterministic transition (all continuous disturbances
/// are zero); the next regime is supplied by the caller.
StateVector step_state(const StateVector& state, const Controls& controls, Regime next,
                       int t, const ExogenousPaths& paths, const ModelParams& params,
                       const ShockSpec& shock);

/// Consumption implied by a savings rate at the state's net output.
inline double consumption_from_savings(double net_output, double savings) {
  return (1.0 - savings) * net_output;
}

}  // namespace sdice
