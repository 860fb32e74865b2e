#include "sdice/params.hpp"

#include <stdexcept>
#include <string>

namespace sdice {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

void finite(double v, const char* field) { require(std::isfinite(v), field, "must be finite"); }

void nonneg(double v, const char* field) {
  finite(v, field);
  require(v >= 0.0, field, "must be >= 0");
}

void positive(double v, const char* field) {
  finite(v, field);
  require(v > 0.0, field, "must be > 0");
}

}  // namespace

Matrix3 ModelParams::carbon_matrix() const {
  const double p21 = carbon_flow_at_up;
  const double p32 = carbon_flow_up_lo;
  const double p11 = 1.0 - p21;
  const double p12 = p21 * carbon_eq_at / carbon_eq_up;
  const double p22 = 1.0 - p12 - p32;
  const double p23 = p32 * carbon_eq_up / carbon_eq_lo;
  const double p33 = 1.0 - p23;
  return {{{p11, p12, 0.0}, {p21, p22, p23}, {0.0, p32, p33}}};
}

Matrix2 ModelParams::temperature_matrix() const {
  return {{{1.0 - xi1 * xi2() - xi1 * xi3, xi1 * xi3}, {xi4, 1.0 - xi4}}};
}

void ModelParams::validate() const {
  positive(years_per_period, "time.years_per_period");
  require(periods >= 1, "time.periods", "must be >= 1");
  nonneg(risk_aversion, "preferences.risk_aversion");
  nonneg(discount_rate, "preferences.discount_rate");
  finite(capital_share, "production.capital_share");
  require(capital_share > 0.0 && capital_share < 1.0, "production.capital_share",
          "must lie in (0, 1)");
  nonneg(depreciation, "production.depreciation");
  require(depreciation < 1.0, "production.depreciation", "must be < 1");
  positive(capital0, "production.capital0");
  positive(population0, "population.initial");
  positive(population_asymptote, "population.asymptote");
  nonneg(population_adjustment, "population.adjustment");
  positive(productivity0, "productivity.initial");
  nonneg(productivity_growth0, "productivity.growth0");
  require(productivity_growth0 < 1.0, "productivity.growth0", "must be < 1");
  nonneg(productivity_decline, "productivity.decline");
  positive(emissions0, "emissions.industrial0");
  positive(output0, "emissions.output0");
  finite(sigma_growth0, "emissions.sigma_growth0");
  nonneg(sigma_decline, "emissions.sigma_decline");
  nonneg(land_emissions0, "emissions.land0");
  nonneg(land_emissions_decline, "emissions.land_decline");
  positive(co2_per_carbon, "carbon.co2_per_carbon");
  nonneg(carbon_flow_at_up, "carbon.flow_at_up");
  nonneg(carbon_flow_up_lo, "carbon.flow_up_lo");
  positive(carbon_eq_at, "carbon.eq_at");
  positive(carbon_eq_up, "carbon.eq_up");
  positive(carbon_eq_lo, "carbon.eq_lo");
  for (double m : carbon0) positive(m, "carbon.initial");
  nonneg(xi1, "climate.xi1");
  nonneg(xi3, "climate.xi3");
  nonneg(xi4, "climate.xi4");
  nonneg(forcing_per_doubling, "climate.forcing_per_doubling");
  positive(climate_sensitivity, "climate.sensitivity");
  for (double v : temperature0) finite(v, "climate.initial");
  finite(other_forcing_start, "climate.other_forcing_start");
  finite(other_forcing_end, "climate.other_forcing_end");
  require(other_forcing_periods >= 1, "climate.other_forcing_periods", "must be >= 1");
  nonneg(damage_coefficient, "damage.coefficient");
  nonneg(abatement_exponent, "damage.abatement_exponent");
  require(abatement_exponent > 1.0, "damage.abatement_exponent", "must be > 1");
  nonneg(backstop_price, "damage.backstop_price");
  nonneg(backstop_decline, "damage.backstop_decline");

  const auto& c = controls;
  nonneg(c.mu_max, "controls.mu_max");
  nonneg(c.mu_max_late, "controls.mu_max_late");
  nonneg(c.initial_mu, "controls.initial_mu");
  finite(c.savings_min, "controls.savings_min");
  finite(c.savings_max, "controls.savings_max");
  require(c.savings_min >= 0.0 && c.savings_min < c.savings_max && c.savings_max < 1.0,
          "controls.savings_min", "need 0 <= savings_min < savings_max < 1");

  const auto m = carbon_matrix();
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      require(m[i][j] >= 0.0, "carbon", "transfer matrix has a negative entry");
}

void ShockSpec::validate() const {
  require(std::isfinite(p_annual) && p_annual >= 0.0 && p_annual <= 1.0, "shock.p_annual",
          "must lie in [0, 1]");
  require(std::isfinite(chi) && chi >= 0.0 && chi < 1.0, "shock.chi", "must lie in [0, 1)");
  require(std::isfinite(phi) && phi >= 0.0 && phi < 1.0, "shock.phi", "must lie in [0, 1)");
}

Matrix2 shock_transition_matrix(const ShockSpec& spec, const ModelParams& params) {
  spec.validate();
  const double q = std::pow(1.0 - spec.p_annual, params.years_per_period);
  return {{{q, 1.0 - q}, {1.0, 0.0}}};
}

}  // namespace sdice
