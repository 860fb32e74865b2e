#include "sdice/reference.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "sdice/golden.hpp"

namespace sdice {

namespace {

/// Decision vector of the direct problem: μ_t and s_t for t < N.
struct ControlPath {
  std::vector<double> mu;
  std::vector<double> savings;
};

class PathObjective {
 public:
  PathObjective(const ModelParams& params, const ExogenousPaths& paths)
      : params_(params), paths_(paths), n_(paths.periods()), weights_(n_ + 1) {
    const double beta = params.discount_factor();
    weights_[0] = 1.0;
    for (int t = 1; t <= n_; ++t) weights_[t] = weights_[t - 1] * beta;
    start_ = initial_state(params, paths);
  }

  int periods() const { return n_; }
  const StateVector& start() const { return start_; }
  long long evaluations() const { return evaluations_; }

  /// One period: utility of the chosen consumption and the successor.
  double advance(StateVector& s, int t, double mu, double savings) const {
    const double q = net_output(s, mu, t, paths_, params_, kNoShock);
    const Controls c{mu, consumption_from_savings(q, savings)};
    const double u = weights_[t] * utility(c.consumption, paths_.population[t], params_);
    s = step_state(s, c, Regime::normal, t, paths_, params_, kNoShock);
    return u;
  }

  double tail(int t0, StateVector s, const ControlPath& x) {
    ++evaluations_;
    double total = 0.0;
    for (int t = t0; t < n_; ++t) total += advance(s, t, x.mu[t], x.savings[t]);
    return total;
  }

  double total(const ControlPath& x) { return tail(0, start_, x); }

 private:
  static constexpr ShockSpec kNoShock{};
  const ModelParams& params_;
  const ExogenousPaths& paths_;
  int n_;
  std::vector<double> weights_;
  StateVector start_;
  long long evaluations_ = 0;
};

struct Bounds {
  std::vector<double> mu_lo, mu_hi;
  double s_lo = 0.0, s_hi = 0.0;
};

Bounds make_bounds(const ModelParams& params, int n) {
  Bounds b;
  b.s_lo = params.controls.savings_min;
  b.s_hi = params.controls.savings_max;
  for (int t = 0; t < n; ++t) {
    b.mu_lo.push_back(params.controls.mu_lower(t));
    b.mu_hi.push_back(params.controls.mu_upper(t));
  }
  return b;
}

struct RestartResult {
  ControlPath x;
  double objective = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int sweeps = 0;
  long long evaluations = 0;
  double last_improvement = 0.0;
};

class CoordinateAscent {
 public:
  CoordinateAscent(const ModelParams& params, const ExogenousPaths& paths,
                   const ReferenceSettings& settings)
      : objective_(params, paths),
        settings_(settings),
        n_(paths.periods()),
        bounds_(make_bounds(params, n_)),
        radius_mu_(n_),
        radius_s_(n_),
        states_(n_ + 1) {
    for (int t = 0; t < n_; ++t) {
      radius_mu_[t] = bounds_.mu_hi[t] - bounds_.mu_lo[t];
      radius_s_[t] = bounds_.s_hi - bounds_.s_lo;
    }
  }

  RestartResult run(ControlPath x) {
    RestartResult r;
    double f = objective_.total(x);
    for (r.sweeps = 1; r.sweeps <= settings_.max_sweeps; ++r.sweeps) {
      const ControlPath before = x;
      const double f_sweep = sweep(x);
      const double f_new = pattern_move(before, x, f_sweep);
      r.last_improvement = f_new - f;
      f = f_new;
      if (r.last_improvement <= settings_.tolerance * std::max(1.0, std::abs(f)) &&
          locally_optimal(x, f)) {
        r.converged = true;
        break;
      }
    }
    r.sweeps = std::min(r.sweeps, settings_.max_sweeps);
    r.objective = f;
    r.x = std::move(x);
    r.evaluations = objective_.evaluations();
    return r;
  }

  const Bounds& bounds() const { return bounds_; }

 private:
  /// Golden search on one coordinate inside a shrinking trust bracket; the
  /// bracket reopens to the full box when the optimum lands on its edge.
  double search(double& value, double& radius, double lo, double hi,
                const std::function<double(double)>& f) {
    if (hi <= lo) {
      value = lo;
      return f(lo);
    }
    const double a = std::max(lo, value - radius);
    const double b = std::min(hi, value + radius);
    ScalarMax best = golden_maximize(f, a, b, settings_.golden_tolerance);
    const double edge = 0.01 * (b - a);
    const bool at_inner_edge = (best.x - a < edge && a > lo) || (b - best.x < edge && b < hi);
    if (at_inner_edge) best = golden_maximize(f, lo, hi, settings_.golden_tolerance);
    const double move = std::abs(best.x - value);
    radius = std::clamp(4.0 * move, 1e-6, hi - lo);
    value = best.x;
    return best.value;
  }

  double sweep(ControlPath& x) {
    states_[0] = objective_.start();
    double prefix = 0.0;
    double f = 0.0;
    for (int t = 0; t < n_; ++t) {
      const auto eval_s = [&](double v) {
        const double keep = x.savings[t];
        x.savings[t] = v;
        const double out = prefix + objective_.tail(t, states_[t], x);
        x.savings[t] = keep;
        return out;
      };
      const auto eval_mu = [&](double v) {
        const double keep = x.mu[t];
        x.mu[t] = v;
        const double out = prefix + objective_.tail(t, states_[t], x);
        x.mu[t] = keep;
        return out;
      };
      f = search(x.savings[t], radius_s_[t], bounds_.s_lo, bounds_.s_hi, eval_s);
      f = search(x.mu[t], radius_mu_[t], bounds_.mu_lo[t], bounds_.mu_hi[t], eval_mu);

      StateVector s = states_[t];
      prefix += objective_.advance(s, t, x.mu[t], x.savings[t]);
      states_[t + 1] = s;
    }
    return f;
  }

  ControlPath clipped_step(const ControlPath& base, const ControlPath& dir, double alpha) const {
    ControlPath y = base;
    for (int t = 0; t < n_; ++t) {
      y.mu[t] = std::clamp(base.mu[t] + alpha * dir.mu[t], bounds_.mu_lo[t], bounds_.mu_hi[t]);
      y.savings[t] = std::clamp(base.savings[t] + alpha * dir.savings[t], bounds_.s_lo, bounds_.s_hi);
    }
    return y;
  }

  /// Extrapolates along the net displacement of the last sweep.
  double pattern_move(const ControlPath& before, ControlPath& x, double f) {
    ControlPath dir = x;
    double norm = 0.0;
    for (int t = 0; t < n_; ++t) {
      dir.mu[t] -= before.mu[t];
      dir.savings[t] -= before.savings[t];
      norm += std::abs(dir.mu[t]) + std::abs(dir.savings[t]);
    }
    if (norm == 0.0) return f;

    const ControlPath base = x;
    auto g = [&](double alpha) { return objective_.total(clipped_step(base, dir, alpha)); };
    double lo = 0.0;
    double hi = 1.0;
    double f_hi = g(hi);
    if (f_hi <= f) return f;
    while (hi < 1024.0) {
      const double next = 2.0 * hi;
      const double f_next = g(next);
      if (f_next <= f_hi) break;
      lo = hi;
      hi = next;
      f_hi = f_next;
    }
    const ScalarMax best = golden_maximize(g, lo, 2.0 * hi, 1e-3 * hi);
    if (best.value <= f) return f;
    x = clipped_step(base, dir, best.x);
    return best.value;
  }

  bool locally_optimal(const ControlPath& x, double f) {
    const double h = settings_.perturbation;
    const double slack = 1e-12 * std::max(1.0, std::abs(f));
    ControlPath y = x;
    for (int t = 0; t < n_; ++t) {
      for (double sign : {-1.0, 1.0}) {
        const double s = std::clamp(x.savings[t] + sign * h, bounds_.s_lo, bounds_.s_hi);
        y.savings[t] = s;
        if (s != x.savings[t] && objective_.total(y) > f + slack) return false;
        y.savings[t] = x.savings[t];

        const double m = std::clamp(x.mu[t] + sign * h, bounds_.mu_lo[t], bounds_.mu_hi[t]);
        y.mu[t] = m;
        if (m != x.mu[t] && objective_.total(y) > f + slack) return false;
        y.mu[t] = x.mu[t];
      }
    }
    return true;
  }

  PathObjective objective_;
  ReferenceSettings settings_;
  int n_;
  Bounds bounds_;
  std::vector<double> radius_mu_;
  std::vector<double> radius_s_;
  std::vector<StateVector> states_;
};

ControlPath starting_point(int restart, const Bounds& b, std::uint64_t seed) {
  const int n = static_cast<int>(b.mu_lo.size());
  ControlPath x{std::vector<double>(n), std::vector<double>(n)};
  if (restart == 0) {
    // Ramp toward full abatement over a century, DICE-like savings.
    for (int t = 0; t < n; ++t) {
      x.mu[t] = std::clamp(0.03 + 0.05 * t, b.mu_lo[t], b.mu_hi[t]);
      x.savings[t] = std::clamp(0.25, b.s_lo, b.s_hi);
    }
    return x;
  }
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(restart));
  auto uniform = [&](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  };
  for (int t = 0; t < n; ++t) {
    x.mu[t] = uniform(b.mu_lo[t], b.mu_hi[t]);
    x.savings[t] = uniform(b.s_lo, b.s_hi);
  }
  return x;
}

}  // namespace

double reference_objective(const ModelParams& params, const ExogenousPaths& paths,
                           const std::vector<double>& mu, const std::vector<double>& savings) {
  PathObjective obj(params, paths);
  if (static_cast<int>(mu.size()) < obj.periods() || static_cast<int>(savings.size()) < obj.periods())
    throw std::invalid_argument("reference_objective: need one control per period");
  return obj.total(ControlPath{mu, savings});
}

ReferenceTrajectory solve_deterministic(const ModelParams& params,
                                        const ReferenceSettings& settings) {
  if (settings.restarts < 1) throw std::invalid_argument("reference: restarts must be >= 1");
  const ExogenousPaths paths = build_exogenous_paths(params);
  const int n = paths.periods();

  auto run_restart = [&](int r) {
    CoordinateAscent ascent(params, paths, settings);
    return ascent.run(starting_point(r, ascent.bounds(), settings.seed));
  };

  std::vector<RestartResult> results(settings.restarts);
  if (settings.workers > 1) {
    std::vector<std::future<RestartResult>> jobs;
    for (int r = 0; r < settings.restarts; ++r) jobs.push_back(std::async(std::launch::async, run_restart, r));
    for (int r = 0; r < settings.restarts; ++r) results[r] = jobs[r].get();
  } else {
    for (int r = 0; r < settings.restarts; ++r) results[r] = run_restart(r);
  }

  int best = 0;
  for (int r = 1; r < settings.restarts; ++r)
    if (results[r].objective > results[best].objective) best = r;

  ReferenceTrajectory ref;
  ref.mu = results[best].x.mu;
  ref.savings_rate = results[best].x.savings;
  ref.objective = results[best].objective;
  ref.diagnostics.converged = results[best].converged;
  ref.diagnostics.best_restart = best;
  ref.diagnostics.sweeps = results[best].sweeps;
  ref.diagnostics.last_improvement = results[best].last_improvement;
  for (const auto& r : results) {
    ref.diagnostics.evaluations += r.evaluations;
    ref.diagnostics.restart_objectives.push_back(r.objective);
  }
  ref.path = replay_savings_controls(initial_state(params, paths), ref.mu, ref.savings_rate, {},
                                     paths, params, ShockSpec{});
  // terminal convention for the stored control vectors
  ref.mu.push_back(ref.path.controls[n].mu);
  ref.savings_rate.push_back(params.controls.savings_min);
  return ref;
}

std::vector<PeriodRanges> grid_ranges_from_reference(const ReferenceTrajectory& ref,
                                                     const ExogenousPaths& paths,
                                                     const RangeFactors& f) {
  const auto& states = ref.path.states;
  if (states.empty()) throw std::invalid_argument("grid ranges: empty reference trajectory");

  std::array<double, 3> m_min, m_max;
  std::array<double, 2> t_max;
  m_min.fill(std::numeric_limits<double>::infinity());
  m_max.fill(-std::numeric_limits<double>::infinity());
  t_max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& s : states) {
    for (int i = 0; i < 3; ++i) {
      m_min[i] = std::min(m_min[i], s.carbon[i]);
      m_max[i] = std::max(m_max[i], s.carbon[i]);
    }
    for (int i = 0; i < 2; ++i) t_max[i] = std::max(t_max[i], s.temperature[i]);
  }

  auto checked = [](Range r, const char* what, std::size_t t) {
    if (!(r.hi > r.lo) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
      throw std::invalid_argument(fmt::format("grid ranges: degenerate {} range at t={}", what, t));
    return r;
  };

  std::vector<PeriodRanges> out(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    auto& r = out[t];
    const double k = states[t].capital;
    r.capital = checked({f.capital_lo * k, f.capital_hi * k}, "capital", t);
    const double a = paths.productivity.at(t);
    r.productivity = checked({f.productivity_lo * a, f.productivity_hi * a}, "productivity", t);
    for (int i = 0; i < 3; ++i)
      r.carbon[i] = checked({f.carbon_lo * m_min[i], f.carbon_hi * m_max[i]}, "carbon", t);
    for (int i = 0; i < 2; ++i)
      r.temperature[i] = checked({0.0, f.temperature_hi * t_max[i]}, "temperature", t);
  }
  return out;
}

void write_reference_csv(const ReferenceTrajectory& ref, const ModelParams& params,
                         std::ostream& out) {
  out << "t,year";
  for (auto v : kAllVariables) out << ',' << name(v);
  out << '\n';
  for (int t = 0; t <= ref.path.periods(); ++t) {
    out << t << ',' << params.year(t);
    for (auto v : kAllVariables) out << ',' << fmt::format("{}", value_at(ref.path, v, t));
    out << '\n';
  }
}

}  // namespace sdice
