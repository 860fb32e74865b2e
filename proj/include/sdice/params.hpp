#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sdice {

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Bounds on the two controls. The upper mitigation bound switches from
/// `mu_max` to `mu_max_late` at period `late_period` (year 2160 with the
/// default 5-year step).
struct ControlBounds {
  double mu_max = 1.0;
  double mu_max_late = 1.2;
  int late_period = 29;
  double savings_min = 0.05;
  double savings_max = 0.60;
  // DICE-2016 pins the first-period mitigation rate.
  double initial_mu = 0.03;
  bool fix_initial_mu = true;

  double mu_lower(int t) const { return (t == 0 && fix_initial_mu) ? initial_mu : 0.0; }
  double mu_upper(int t) const {
    if (t == 0 && fix_initial_mu) return initial_mu;
    return t < late_period ? mu_max : mu_max_late;
  }
};

/// DICE-2016 calibration. Every default below is the published value; the
/// derived coefficients (carbon and temperature matrices, σ_0, ρ̃) are
/// computed from them on demand so that a config override of a primitive
/// propagates consistently.
struct ModelParams {
  // time
  double years_per_period = 5.0;
  int periods = 80;
  int base_year = 2015;

  // preferences
  double risk_aversion = 1.45;
  double discount_rate = 0.015;

  // production
  double capital_share = 0.3;
  double depreciation = 0.1;
  double capital0 = 223.0;

  // population: L_t = L_{t-1} (asymptote / L_{t-1})^adjustment
  double population0 = 7.403;
  double population_asymptote = 11.5;
  double population_adjustment = 0.134;

  // total factor productivity
  double productivity0 = 5.115;
  double productivity_growth0 = 0.076;
  double productivity_decline = 0.005;

  // emission intensity and land-use emissions
  double emissions0 = 35.85;
  double output0 = 105.5;
  double sigma_growth0 = -0.0152;
  double sigma_decline = 0.001;
  double land_emissions0 = 2.6;
  double land_emissions_decline = 0.115;

  // carbon cycle
  double co2_per_carbon = 3.666;
  double carbon_flow_at_up = 0.12;   // φ21
  double carbon_flow_up_lo = 0.007;  // φ32
  double carbon_eq_at = 588.0;
  double carbon_eq_up = 360.0;
  double carbon_eq_lo = 1720.0;
  std::array<double, 3> carbon0{851.0, 460.0, 1740.0};

  // climate
  double xi1 = 0.1005;
  double xi3 = 0.088;
  double xi4 = 0.025;
  double forcing_per_doubling = 3.6813;
  double climate_sensitivity = 3.1;
  std::array<double, 2> temperature0{0.85, 0.0068};
  double other_forcing_start = 0.5;
  double other_forcing_end = 1.0;
  int other_forcing_periods = 17;

  // damages and abatement
  double damage_coefficient = 0.00236;
  double abatement_exponent = 2.6;
  double backstop_price = 550.0;
  double backstop_decline = 0.025;

  ControlBounds controls{};

  double rho_tilde() const { return std::log1p(discount_rate); }
  /// e^{-ρ̃Δ} = (1+ρ)^{-Δ}
  double discount_factor() const { return std::exp(-rho_tilde() * years_per_period); }
  double emission_to_carbon() const { return 1.0 / co2_per_carbon; }
  double sigma0() const { return emissions0 / (output0 * (1.0 - controls.initial_mu)); }
  double xi2() const { return forcing_per_doubling / climate_sensitivity; }
  double capital_retention() const { return std::pow(1.0 - depreciation, years_per_period); }
  int year(int t) const { return base_year + static_cast<int>(std::lround(years_per_period * t)); }

  /// Column-stochastic carbon transfer matrix acting on (M_AT, M_UP, M_LO).
  Matrix3 carbon_matrix() const;
  Matrix2 temperature_matrix() const;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

/// Discrete output shock. `chi` cuts gross output while stressed; `phi`
/// compounds into productivity when `persistent` is set.
struct ShockSpec {
  double p_annual = 0.0;
  double chi = 0.0;
  double phi = 0.0;
  bool persistent = false;

  bool trivial() const { return chi == 0.0 && phi == 0.0; }
  void validate() const;
};

/// Two-state regime. Stressed is always followed by normal.
enum class Regime : std::uint8_t { normal = 0, stressed = 1 };

inline constexpr int kRegimeCount = 2;

inline int index(Regime r) { return static_cast<int>(r); }

/// Row-stochastic transition matrix; row i is Pr[I_{t+1} = · | I_t = i].
Matrix2 shock_transition_matrix(const ShockSpec& spec, const ModelParams& params);

}  // namespace sdice
