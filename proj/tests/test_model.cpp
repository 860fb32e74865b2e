#include <cmath>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "sdice/model.hpp"

using namespace sdice;
using doctest::Approx;

// Values from tests/oracles/scalar_oracles.py (mpmath, 40 digits).
namespace oracle {
constexpr double L1 = 7.8530908476727118533;
constexpr double utility_c30 = 38.433356974099646022;
constexpr double gross_output_t0 = 105.17742197545905579;
constexpr double sigma0 = 0.3503200273611178971;
constexpr double omega_mu1_t0 = 0.92418874036591736792;
constexpr double net_output_t0 = 104.99722831125412081;
constexpr double emissions_t0 = 38.340384623888219432;
constexpr double carbon_price_half_t10 = 140.85129796201630794;
constexpr double q_p001 = 0.9509900499;
constexpr double A1 = 5.5357142857142857143;
constexpr double A2 = 5.9788909260293278918;
constexpr double sigma1 = 0.32468227884061028204;
constexpr double sigma2 = 0.30103494108661869446;
constexpr double forcing_t0 = 2.4633955006764260665;
}  // namespace oracle

namespace {

struct Fixture {
  ModelParams params;
  ExogenousPaths paths = build_exogenous_paths(params);
  ShockSpec none;
  StateVector x0 = initial_state(params, paths);
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "exogenous paths start at the calibration") {
  CHECK(paths.periods() == 80);
  CHECK(paths.population[0] == 7.403);
  CHECK(paths.productivity[0] == 5.115);
  CHECK(paths.sigma[0] == Approx(oracle::sigma0).epsilon(1e-14));
  CHECK(paths.land_emissions[0] == 2.6);
  CHECK(paths.other_forcing[0] == 0.5);
  CHECK(paths.backstop[0] == 550.0);
}

TEST_CASE_FIXTURE(Fixture, "exogenous paths match the high-precision recursions") {
  CHECK(paths.population[1] == Approx(oracle::L1).epsilon(1e-14));
  CHECK(paths.productivity[1] == Approx(oracle::A1).epsilon(1e-14));
  CHECK(paths.productivity[2] == Approx(oracle::A2).epsilon(1e-14));
  CHECK(paths.sigma[1] == Approx(oracle::sigma1).epsilon(1e-14));
  CHECK(paths.sigma[2] == Approx(oracle::sigma2).epsilon(1e-14));
}

TEST_CASE_FIXTURE(Fixture, "population rises monotonically towards its asymptote") {
  for (int t = 1; t <= paths.periods(); ++t) {
    CHECK(paths.population[t] > paths.population[t - 1]);
    CHECK(paths.population[t] < 11.5);
  }
  ModelParams long_run;
  long_run.periods = 400;
  CHECK(build_exogenous_paths(long_run).population.back() == Approx(11.5).epsilon(1e-9));
}

TEST_CASE("exogenous paths reject bad horizons and parameters") {
  ModelParams p;
  p.periods = 0;
  CHECK_THROWS_AS(build_exogenous_paths(p), std::invalid_argument);
  p = {};
  p.discount_rate = std::nan("");
  CHECK_THROWS_AS(build_exogenous_paths(p), std::invalid_argument);
}

TEST_CASE_FIXTURE(Fixture, "utility") {
  SUBCASE("zero at c = L") {
    for (double l : {1.0, 7.403, 11.5}) CHECK(utility(l, l, params) == 0.0);
  }
  SUBCASE("positive at c = 2L") {
    const double expected = 5.0 * 7.403 / -0.45 * (std::pow(2.0, -0.45) - 1.0);
    CHECK(expected > 0.0);
    CHECK(utility(2 * 7.403, 7.403, params) == Approx(expected).epsilon(1e-14));
  }
  SUBCASE("matches the oracle") {
    CHECK(utility(30.0, 7.403, params) == Approx(oracle::utility_c30).epsilon(1e-13));
  }
  SUBCASE("log limit at alpha = 1") {
    params.risk_aversion = 1.0;
    CHECK(utility(30.0, 7.403, params) == Approx(5.0 * 7.403 * std::log(30.0 / 7.403)).epsilon(1e-14));
  }
  SUBCASE("strictly increasing in c") {
    for (double l : {1.0, 7.403, 11.5})
      for (double c = 1.0; c < 200.0; c *= 1.3) CHECK(utility(c * 1.01, l, params) > utility(c, l, params));
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(utility(0.0, 7.403, params), std::domain_error);
    CHECK_THROWS_AS(utility(-1.0, 7.403, params), std::domain_error);
    CHECK_THROWS_AS(utility(30.0, 0.0, params), std::domain_error);
  }
}

TEST_CASE_FIXTURE(Fixture, "gross output") {
  const double y = gross_output(5.115, 223.0, 7.403, 0.0, params);
  CHECK(y == Approx(oracle::gross_output_t0).epsilon(1e-14));
  CHECK(std::abs(y - 105.2) < 0.5);
  CHECK(gross_output(5.115, 223.0, 7.403, 0.05, params) == Approx(0.95 * y).epsilon(1e-15));
  CHECK(gross_output(2 * 5.115, 223.0, 7.403, 0.0, params) == Approx(2 * y).epsilon(1e-15));
  CHECK_THROWS_AS(gross_output(5.115, 0.0, 7.403, 0.0, params), std::domain_error);
  CHECK_THROWS_AS(gross_output(5.115, 223.0, 7.403, 1.0, params), std::domain_error);
}

TEST_CASE_FIXTURE(Fixture, "damage and abatement factor") {
  CHECK(damage_abatement_factor(0.0, paths.sigma[0], 0.0, 0, params) == 1.0);
  CHECK(damage_abatement_factor(0.0, paths.sigma[0], 1.0, 0, params) == Approx(0.99764).epsilon(1e-15));
  CHECK(damage_abatement_factor(1.0, paths.sigma[0], 0.85, 0, params) ==
        Approx(oracle::omega_mu1_t0).epsilon(1e-14));
  CHECK(damage_abatement_factor(0.0, paths.sigma[0], 25.0, 0, params) < 0.0);
}

TEST_CASE_FIXTURE(Fixture, "net output") {
  StateVector cold = x0;
  cold.temperature[0] = 0.0;
  CHECK(net_output(cold, 0.0, 0, paths, params, none) == state_gross_output(cold, 0, paths, params, none));
  CHECK(net_output(x0, 0.03, 0, paths, params, none) == Approx(oracle::net_output_t0).epsilon(1e-13));

  const ShockSpec shock{0.01, 0.1, 0.0, false};
  StateVector stressed = x0;
  stressed.regime = Regime::stressed;
  CHECK(net_output(stressed, 0.3, 4, paths, params, shock) ==
        Approx(0.9 * net_output(x0, 0.3, 4, paths, params, shock)).epsilon(1e-14));

  StateVector hot = x0;
  hot.temperature[0] = 25.0;
  CHECK(net_output(hot, 0.0, 0, paths, params, none) == kMinNetOutput);
}

TEST_CASE_FIXTURE(Fixture, "emissions") {
  CHECK(emissions(x0, 0.03, 0, paths, params, none) == Approx(oracle::emissions_t0).epsilon(1e-13));
  for (int t : {0, 5, 30}) CHECK(emissions(x0, 1.0, t, paths, params, none) == paths.land_emissions[t]);

  const ShockSpec shock{0.01, 0.05, 0.0, false};
  StateVector stressed = x0;
  stressed.regime = Regime::stressed;
  const double base = emissions(x0, 0.0, 0, paths, params, shock) - 2.6;
  CHECK(emissions(stressed, 0.0, 0, paths, params, shock) - 2.6 == Approx(0.95 * base).epsilon(1e-13));
}

TEST_CASE_FIXTURE(Fixture, "radiative forcing") {
  CHECK(radiative_forcing(588.0, 0, paths, params) == 0.5);
  CHECK(radiative_forcing(1176.0, 0, paths, params) == Approx(4.1813).epsilon(1e-15));
  CHECK(radiative_forcing(851.0, 0, paths, params) == Approx(oracle::forcing_t0).epsilon(1e-14));
  CHECK(paths.other_forcing[17] == 1.0);
  CHECK(paths.other_forcing[40] == 1.0);
  CHECK(0.5 + 0.5 * 17 / 17.0 == paths.other_forcing[17]);
  CHECK(paths.other_forcing[16] < 1.0);
  CHECK_THROWS_AS(radiative_forcing(0.0, 0, paths, params), std::domain_error);
}

TEST_CASE_FIXTURE(Fixture, "carbon price") {
  CHECK(carbon_price(1.0, 0, params) == 550.0);
  CHECK(carbon_price(1.0, 1, params) == Approx(536.25).epsilon(1e-15));
  CHECK(carbon_price(0.5, 10, params) == Approx(oracle::carbon_price_half_t10).epsilon(1e-13));
  CHECK(carbon_price(0.0, 3, params) == 0.0);
}

TEST_CASE_FIXTURE(Fixture, "shock transition matrix") {
  const auto m = shock_transition_matrix({0.01, 0.05, 0.0, false}, params);
  CHECK(m[0][0] == Approx(oracle::q_p001).epsilon(1e-15));
  CHECK(m[0][0] + m[0][1] == 1.0);
  CHECK(m[1][0] == 1.0);
  CHECK(m[1][1] == 0.0);
  const auto identity = shock_transition_matrix({}, params);
  CHECK(identity[0][0] == 1.0);
  CHECK(identity[0][1] == 0.0);
  CHECK_THROWS_AS(shock_transition_matrix({1.5, 0.0, 0.0, false}, params), std::invalid_argument);
}

TEST_CASE_FIXTURE(Fixture, "carbon matrix columns sum to one") {
  const auto m = params.carbon_matrix();
  for (int j = 0; j < 3; ++j) CHECK(m[0][j] + m[1][j] + m[2][j] == Approx(1.0).epsilon(1e-15));
}

TEST_CASE_FIXTURE(Fixture, "step_state conserves carbon with zero emissions") {
  // μ = 1 leaves land-use emissions only; switching those off isolates the carbon matrix.
  params.land_emissions0 = 0.0;
  paths = build_exogenous_paths(params);
  const double q = net_output(x0, 1.0, 0, paths, params, none);
  StateVector s = x0;
  s.carbon = {1234.5, 321.0, 2100.25};
  const double total = std::accumulate(s.carbon.begin(), s.carbon.end(), 0.0);
  for (int t = 0; t < 30; ++t) {
    s = step_state(s, {1.0, 0.8 * q}, Regime::normal, t, paths, params, none);
    const double now = std::accumulate(s.carbon.begin(), s.carbon.end(), 0.0);
    CHECK(std::abs(now - total) / total < 1e-10);
  }
}

TEST_CASE_FIXTURE(Fixture, "step_state keeps capital with no investment and no depreciation") {
  params.depreciation = 0.0;
  const double q = net_output(x0, 0.2, 0, paths, params, none);
  const auto next = step_state(x0, {0.2, q}, Regime::normal, 0, paths, params, none);
  CHECK(next.capital == x0.capital);
}

TEST_CASE_FIXTURE(Fixture, "step_state follows the transition equations") {
  const double mu = 0.1;
  const double q = net_output(x0, mu, 0, paths, params, none);
  const Controls c{mu, 0.75 * q};
  const auto next = step_state(x0, c, Regime::stressed, 0, paths, params, none);
  CHECK(next.regime == Regime::stressed);
  CHECK(next.capital == Approx(223.0 * std::pow(0.9, 5) + 5.0 * 0.25 * q).epsilon(1e-14));
  const double e = emissions(x0, mu, 0, paths, params, none);
  const auto phi = params.carbon_matrix();
  CHECK(next.carbon[0] == Approx(phi[0][0] * 851 + phi[0][1] * 460 + phi[0][2] * 1740 + 5.0 * e / 3.666).epsilon(1e-14));
  const double f = radiative_forcing(851.0, 0, paths, params);
  const auto pt = params.temperature_matrix();
  CHECK(next.temperature[0] == Approx(pt[0][0] * 0.85 + pt[0][1] * 0.0068 + 0.1005 * f).epsilon(1e-14));
  CHECK(next.productivity == paths.productivity[1]);
}

TEST_CASE_FIXTURE(Fixture, "step_state floors capital") {
  const Controls c{0.0, 1e9};
  CHECK(step_state(x0, c, Regime::normal, 0, paths, params, none).capital == kMinCapital);
}

TEST_CASE_FIXTURE(Fixture, "persistent shock with phi = 0 reproduces the baseline productivity") {
  const ShockSpec shock{0.01, 0.05, 0.0, true};
  StateVector s = x0;
  for (int t = 0; t < 40; ++t) {
    s.regime = t % 3 == 1 ? Regime::stressed : Regime::normal;
    const double q = net_output(s, 0.2, t, paths, params, shock);
    s = step_state(s, {0.2, 0.75 * q}, Regime::normal, t, paths, params, shock);
    CHECK(s.productivity == Approx(paths.productivity[t + 1]).epsilon(1e-13));
  }
}

TEST_CASE_FIXTURE(Fixture, "persistent shock compounds into productivity") {
  const ShockSpec shock{0.01, 0.05, 0.05, true};
  StateVector s = x0;
  s.regime = Regime::stressed;
  const double q = net_output(s, 0.2, 0, paths, params, shock);
  const auto next = step_state(s, {0.2, 0.75 * q}, Regime::normal, 0, paths, params, shock);
  CHECK(next.productivity == Approx(paths.productivity[1] * 0.95).epsilon(1e-14));
}
