#include "sdice/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace sdice {

namespace {

constexpr std::array<std::string_view, 5> kScenarioIds{"A1", "A2", "B", "C", "deterministic"};

bool same_shock(const ShockSpec& a, const ShockSpec& b) {
  return a.p_annual == b.p_annual && a.chi == b.chi && a.phi == b.phi && a.persistent == b.persistent;
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Runs body(i) for i in [0, n) on `workers` threads; rethrows the first error.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!failed.exchange(true)) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double policy_at(const Solution& solution, const std::vector<std::vector<double>>& table, int t,
                 const StateVector& state) {
  const Grid& g = solution.grid;
  const std::size_t n = g.continuous_size();
  const auto x = g.coordinates(state);
  return interpolate(std::span<const double>(table.at(t)).subspan(index(state.regime) * n, n),
                     g.axes(t), std::span<const double>(x.data(), g.rank()));
}

}  // namespace

void ScenarioConfig::validate() const {
  shock.validate();
  if (trajectories < 1) throw std::invalid_argument(fmt::format("simulation.trajectories must be >= 1, got {}", trajectories));
}

ScenarioConfig scenario(std::string_view id) {
  ScenarioConfig c;
  c.id = std::string(id);
  if (id == "deterministic") return c;
  c.forced_prefix = true;
  c.shock.p_annual = 0.01;
  if (id == "A1") {
    c.shock.chi = 0.05;
  } else if (id == "A2") {
    c.shock.chi = 0.10;
  } else if (id == "B" || id == "C") {
    c.shock.chi = 0.05;
    c.shock.phi = 0.05;
    c.shock.persistent = true;
    if (id == "C") c.policy = PolicySource::deterministic_fixed;
  } else {
    throw std::invalid_argument(fmt::format("unknown scenario '{}' (expected one of A1, A2, B, C, deterministic)", id));
  }
  return c;
}

std::span<const std::string_view> scenario_ids() { return kScenarioIds; }

std::vector<RegimePath> sample_regimes(const ScenarioConfig& config, const Matrix2& transition,
                                       int periods) {
  config.validate();
  std::vector<RegimePath> out(static_cast<std::size_t>(config.trajectories));
  for (std::size_t m = 0; m < out.size(); ++m) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(m >> 32)};
    std::mt19937_64 engine(seq);
    auto& path = out[m];
    path.assign(static_cast<std::size_t>(periods) + 1, Regime::normal);
    for (int t = 1; t <= periods; ++t) {
      const double u = uniform01(engine);
      if (config.forced_prefix && t == 1) {
        path[t] = Regime::stressed;
        continue;
      }
      path[t] = u < transition[index(path[t - 1])][1] ? Regime::stressed : Regime::normal;
    }
  }
  return out;
}

std::vector<Trajectory> simulate_trajectories(const ScenarioConfig& config, const Policy& policy,
                                              const ReferenceTrajectory& reference,
                                              const Problem& problem,
                                              std::span<const RegimePath> regimes,
                                              unsigned workers) {
  config.validate();
  const int n = problem.paths.periods();
  const bool fixed = std::holds_alternative<FixedPolicy>(policy);
  if (fixed != (config.policy == PolicySource::deterministic_fixed))
    throw std::invalid_argument(fmt::format("scenario {}: policy source does not match the configured policy", config.id));
  if (!same_shock(config.shock, problem.shock))
    throw std::invalid_argument(fmt::format("scenario {}: problem shock differs from scenario shock", config.id));
  if (static_cast<int>(reference.mu.size()) < n || static_cast<int>(reference.savings_rate.size()) < n)
    throw std::invalid_argument("simulate: reference horizon shorter than the model horizon");
  if (regimes.size() != static_cast<std::size_t>(config.trajectories))
    throw std::invalid_argument("simulate: need one regime path per trajectory");
  for (const auto& r : regimes)
    if (static_cast<int>(r.size()) != n + 1) throw std::invalid_argument("simulate: regime path length must be N+1");

  if (fixed) {
    const auto& ref = *std::get<FixedPolicy>(policy).reference;
    std::vector<Trajectory> out(regimes.size());
    parallel_for(out.size(), workers, [&](std::size_t m) {
      out[m] = replay_savings_controls(initial_state(problem.params, problem.paths), ref.mu,
                                       ref.savings_rate, regimes[m], problem.paths,
                                       problem.params, problem.shock);
    });
    return out;
  }

  const auto& sp = std::get<StochasticPolicy>(policy);
  const Solution& sol = *sp.solution;
  if (sol.grid.periods() != n) throw std::invalid_argument("simulate: solution horizon differs from the model horizon");

  const std::size_t count = regimes.size();
  std::vector<Trajectory> out(count);
  std::vector<StateVector> state(count);
  std::vector<std::vector<double>> savings(count, std::vector<double>(n + 1, problem.params.controls.savings_min));
  for (std::size_t m = 0; m < count; ++m) {
    out[m].states.reserve(n + 1);
    out[m].controls.reserve(n + 1);
    state[m] = initial_state(problem.params, problem.paths);
    state[m].regime = regimes[m][0];
  }

  // period-major so each continuation is built once and shared
  for (int t = 0; t < n; ++t) {
    const std::span<const double> next =
        t + 1 == n ? std::span<const double>{} : std::span<const double>(sol.values.period[t + 1]);
    const Continuation cont(sol.grid, t, next, problem.transition);
    parallel_for(count, workers, [&](std::size_t m) {
      const StateVector& s = state[m];
      Controls c;
      if (t == 0) {
        const double q = net_output(s, reference.mu[0], 0, problem.paths, problem.params, problem.shock);
        c = {reference.mu[0], consumption_from_savings(q, reference.savings_rate[0])};
        savings[m][0] = reference.savings_rate[0];
      } else {
        const Seed seed{policy_at(sol, sol.policy.mu, t, s), policy_at(sol, sol.policy.savings, t, s)};
        const NodePolicy p = optimize_controls(s, t, cont, problem, sp.settings, seed);
        c = {p.mu, p.consumption};
        savings[m][t] = p.savings;
      }
      out[m].states.push_back(s);
      out[m].controls.push_back(c);
      state[m] = step_state(s, c, regimes[m][t + 1], t, problem.paths, problem.params, problem.shock);
    });
  }
  for (std::size_t m = 0; m < count; ++m) {
    out[m].states.push_back(state[m]);
    out[m].controls.push_back(terminal_controls(state[m], n, problem.paths, problem.params, problem.shock));
    derived_outputs(out[m], problem.paths, problem.params, problem.shock);
    out[m].savings = std::move(savings[m]);
  }
  return out;
}

std::vector<Trajectory> simulate_trajectories(const ScenarioConfig& config, const Policy& policy,
                                              const ReferenceTrajectory& reference,
                                              const Problem& problem, unsigned workers) {
  const auto regimes = sample_regimes(config, problem.transition, problem.paths.periods());
  return simulate_trajectories(config, policy, reference, problem, regimes, workers);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("quantile probability {} outside [0, 1]", p));
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

QuantileBands quantile_bands(std::span<const Trajectory> trajectories,
                             std::vector<double> probabilities) {
  if (trajectories.empty()) throw std::invalid_argument("quantile_bands: no trajectories");
  for (double p : probabilities)
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument(fmt::format("quantile_bands: probability {} outside (0, 1)", p));
  const int n = trajectories.front().periods();
  for (const auto& tr : trajectories)
    if (tr.periods() != n) throw std::invalid_argument("quantile_bands: trajectories differ in length");

  QuantileBands bands;
  bands.probabilities = std::move(probabilities);
  std::vector<double> sample(trajectories.size());
  for (std::size_t v = 0; v < kAllVariables.size(); ++v) {
    bands.mean[v].resize(n + 1);
    bands.quantiles[v].assign(bands.probabilities.size(), std::vector<double>(n + 1));
    for (int t = 0; t <= n; ++t) {
      for (std::size_t m = 0; m < trajectories.size(); ++m)
        sample[m] = value_at(trajectories[m], kAllVariables[v], t);
      // shifted by the first sample so identical samples give their value exactly
      double shifted = 0.0;
      for (double x : sample) shifted += x - sample[0];
      bands.mean[v][t] = sample[0] + shifted / static_cast<double>(sample.size());
      std::sort(sample.begin(), sample.end());
      for (std::size_t k = 0; k < bands.probabilities.size(); ++k)
        bands.quantiles[v][k][t] = empirical_quantile(sample, bands.probabilities[k]);
    }
  }
  return bands;
}

std::string quantile_label(double p) {
  return fmt::format("q{:03d}", static_cast<int>(std::lround(p * 1000.0)));
}

void write_trajectories_csv(std::string_view scenario, std::span<const Trajectory> trajectories,
                            int last_period, std::ostream& out) {
  out << "scenario,trajectory,t,variable,value\n";
  for (std::size_t m = 0; m < trajectories.size(); ++m) {
    const int n = std::min(last_period, trajectories[m].periods());
    for (int t = 0; t <= n; ++t)
      for (Variable v : kAllVariables)
        out << fmt::format("{},{},{},{},{}\n", scenario, m, t, name(v), value_at(trajectories[m], v, t));
  }
}

void write_band_csv(const QuantileBands& bands, Variable v, const Trajectory& deterministic,
                    int last_period, std::ostream& out) {
  const auto vi = static_cast<std::size_t>(v);
  const int n = std::min({last_period, bands.periods(), deterministic.periods()});
  std::vector<std::size_t> lower, upper;
  for (std::size_t k = 0; k < bands.probabilities.size(); ++k)
    (bands.probabilities[k] < 0.5 ? lower : upper).push_back(k);

  out << 't';
  for (auto k : lower) out << ',' << quantile_label(bands.probabilities[k]);
  out << ",mean";
  for (auto k : upper) out << ',' << quantile_label(bands.probabilities[k]);
  out << ",deterministic\n";
  for (int t = 0; t <= n; ++t) {
    out << t;
    for (auto k : lower) out << ',' << fmt::format("{}", bands.quantiles[vi][k][t]);
    out << ',' << fmt::format("{}", bands.mean[vi][t]);
    for (auto k : upper) out << ',' << fmt::format("{}", bands.quantiles[vi][k][t]);
    out << ',' << fmt::format("{}", value_at(deterministic, v, t)) << '\n';
  }
}

}  // namespace sdice
