#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sdice/model.hpp"

namespace sdice {

/// One path over t = 0..N. Controls at t = N follow the terminal convention
/// (μ at its lower bound, savings at the minimum): with a zero continuation
/// value that is exactly what the Bellman operator selects.
struct Trajectory {
  std::vector<StateVector> states;
  std::vector<Controls> controls;

  // derived per period
  std::vector<double> savings;
  std::vector<double> gross_output;
  std::vector<double> net_output;
  std::vector<double> emissions;
  std::vector<double> forcing;
  std::vector<double> carbon_price;
  std::vector<double> damage_fraction;

  int periods() const { return static_cast<int>(states.size()) - 1; }
};

/// Reported series, in the order of the published figure panels.
enum class Variable { MIU, S, K, YNET, TATM, TOCEAN, CPRICE, DAMFCT, MAT, MU, ML };

inline constexpr std::array<Variable, 11> kAllVariables{
    Variable::MIU,  Variable::S,      Variable::K,      Variable::YNET,
    Variable::TATM, Variable::TOCEAN, Variable::CPRICE, Variable::DAMFCT,
    Variable::MAT,  Variable::MU,     Variable::ML};

std::string_view name(Variable v);
std::optional<Variable> parse_variable(std::string_view name);

double value_at(const Trajectory& traj, Variable v, int t);

/// Fills savings rate, carbon price, damage fraction, forcing, gross/net
/// output and emissions from the stored states and controls.
void derived_outputs(Trajectory& traj, const ExogenousPaths& paths, const ModelParams& params,
                     const ShockSpec& shock);

/// Rolls the model forward from `start` applying (μ_t, s_t) for t < N.
/// `regimes[t]` is I_t; when empty all periods are normal. The savings
/// series holds the applied rates.
Trajectory replay_savings_controls(const StateVector& start, std::span<const double> mu,
                                   std::span<const double> savings,
                                   std::span<const Regime> regimes, const ExogenousPaths& paths,
                                   const ModelParams& params, const ShockSpec& shock);

/// Σ_{t<N} e^{-ρ̃Δt} U(c_t, L_t)
double discounted_utility(const Trajectory& traj, const ExogenousPaths& paths,
                          const ModelParams& params);

/// Terminal-period controls (see Trajectory).
Controls terminal_controls(const StateVector& state, int t, const ExogenousPaths& paths,
                           const ModelParams& params, const ShockSpec& shock);

}  // namespace sdice
