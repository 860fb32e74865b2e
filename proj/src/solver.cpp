#include "sdice/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "sdice/golden.hpp"

namespace sdice {

SolverError::SolverError(int t, std::size_t node, const std::string& what)
    : std::runtime_error(fmt::format("backward induction failed at t={} node={}: {}", t, node, what)),
      period_(t),
      node_(node) {}

Problem make_problem(const ModelParams& params, const ExogenousPaths& paths,
                     const ShockSpec& shock) {
  return Problem{params, paths, shock, shock_transition_matrix(shock, params)};
}

double expected_continuation(std::span<const double> next_values, const Grid& grid, int t,
                             const StateVector& state, const Controls& controls,
                             const Problem& problem) {
  if (next_values.empty()) return 0.0;
  const std::size_t n = grid.continuous_size();
  if (next_values.size() != grid.size()) throw std::invalid_argument("expected_continuation: table size mismatch");
  const auto& row = problem.transition[index(state.regime)];
  double total = 0.0;
  for (int j = 0; j < kRegimeCount; ++j) {
    if (row[j] == 0.0) continue;
    const StateVector next = step_state(state, controls, static_cast<Regime>(j), t, problem.paths,
                                        problem.params, problem.shock);
    const auto x = grid.coordinates(next);
    total += row[j] * interpolate(next_values.subspan(j * n, n), grid.axes(t + 1),
                                  std::span<const double>(x.data(), grid.rank()));
  }
  return total;
}

Continuation::Continuation(const Grid& grid, int t, std::span<const double> next_values,
                           const Matrix2& transition)
    : grid_(&grid), t_(t), zero_(next_values.empty()) {
  if (zero_) return;
  const std::size_t n = grid.continuous_size();
  if (next_values.size() != grid.size()) throw std::invalid_argument("continuation: table size mismatch");
  for (int i = 0; i < kRegimeCount; ++i) {
    auto& out = blended_[i];
    out.assign(n, 0.0);
    for (int j = 0; j < kRegimeCount; ++j) {
      const double p = transition[i][j];
      if (p == 0.0) continue;
      const double* v = next_values.data() + j * n;
      for (std::size_t k = 0; k < n; ++k) out[k] += p * v[k];
    }
  }
}

double Continuation::value(const StateVector& next, Regime current) const {
  if (zero_) return 0.0;
  const auto x = grid_->coordinates(next);
  return interpolate(blended(current), grid_->axes(t_ + 1),
                     std::span<const double>(x.data(), grid_->rank()));
}

double bellman_value(const StateVector& state, int t, const Controls& controls,
                     const Continuation& continuation, const Problem& problem) {
  const double u = utility(controls.consumption, problem.paths.population[t], problem.params);
  if (continuation.zero()) return u;
  // rebuild the raw expectation from the blended table: the successor's
  // continuous part does not depend on the next regime
  const StateVector next = step_state(state, controls, Regime::normal, t, problem.paths,
                                      problem.params, problem.shock);
  return u + problem.params.discount_factor() * continuation.value(next, state.regime);
}

namespace {

/// Bellman objective at one state with the continuation contracted onto the
/// two coordinates the controls move (K' and M_AT'). Multilinear
/// interpolation is a tensor product, so contracting the fixed coordinates
/// first gives the same value as the full 2^d-corner sum.
class NodeObjective {
 public:
  NodeObjective(const StateVector& state, int t, const Continuation& cont, const Problem& p)
      : params_(p.params) {
    const auto& paths = p.paths;
    gross_ = state_gross_output(state, t, paths, p.params, p.shock);
    sigma_ = paths.sigma[t];
    abatement_ = sigma_ * paths.backstop[t] / (1000.0 * p.params.abatement_exponent);
    damage_ = p.params.damage_coefficient * state.tat() * state.tat();
    capital_kept_ = state.capital * p.params.capital_retention();
    dt_ = p.params.years_per_period;
    population_ = paths.population[t];
    land_ = paths.land_emissions[t];
    const auto phi = p.params.carbon_matrix();
    mat_kept_ = phi[0][0] * state.carbon[0] + phi[0][1] * state.carbon[1] + phi[0][2] * state.carbon[2];
    emission_scale_ = dt_ * p.params.emission_to_carbon();
    beta_ = p.params.discount_factor();
    zero_ = cont.zero();
    if (!zero_) contract(state, t, cont, p);
  }

  double operator()(double mu, double savings) const {
    const double q = net(mu);
    const double c = (1.0 - savings) * q;
    const double u = utility(c, population_, params_);
    if (zero_) return u;
    const double k = std::max(capital_kept_ + dt_ * (q - c), kMinCapital);
    const double e = (1.0 - mu) * sigma_ * gross_ + land_;
    return u + beta_ * surface(k, mat_kept_ + emission_scale_ * e);
  }

  double net(double mu) const {
    const double omega = 1.0 - abatement_ * std::pow(mu, params_.abatement_exponent) - damage_;
    return std::max(omega * gross_, kMinNetOutput);
  }

 private:
  void contract(const StateVector& state, int t, const Continuation& cont, const Problem& p) {
    const Grid& grid = cont.grid();
    // fixed successor coordinates do not depend on the controls
    const StateVector next = step_state(state, Controls{p.params.controls.mu_lower(t), net(0.0)},
                                        Regime::normal, t, p.paths, p.params, p.shock);
    const auto axes = grid.axes(t + 1);
    const int pk = grid.position(Dim::capital);
    const int pm = grid.position(Dim::mat);
    k_axis_ = axes[pk];
    m_axis_ = axes[pm];
    nm_ = static_cast<std::size_t>(m_axis_.size());
    const std::size_t nk = static_cast<std::size_t>(k_axis_.size());
    const std::size_t stride_k = grid.stride(pk);
    const std::size_t stride_m = grid.stride(pm);

    std::size_t base = 0;
    std::array<std::size_t, kMaxDims> fixed_stride{};
    std::array<Axis::Cell, kMaxDims> fixed_cell{};
    std::size_t nfixed = 0;
    for (std::size_t k = 0; k < grid.rank(); ++k) {
      if (static_cast<int>(k) == pk || static_cast<int>(k) == pm) continue;
      const auto cell = axes[k].locate(coordinate(next, grid.dims()[k]));
      base += static_cast<std::size_t>(cell.index) * grid.stride(k);
      fixed_stride[nfixed] = grid.stride(k);
      fixed_cell[nfixed] = cell;
      ++nfixed;
    }

    const auto table = cont.blended(state.regime);
    surface_.assign(nk * nm_, 0.0);
    const std::size_t corners = std::size_t{1} << nfixed;
    for (std::size_t c = 0; c < corners; ++c) {
      double w = 1.0;
      std::size_t offset = base;
      for (std::size_t k = 0; k < nfixed; ++k) {
        if (c >> k & 1U) {
          w *= fixed_cell[k].weight;
          offset += fixed_stride[k];
        } else {
          w *= 1.0 - fixed_cell[k].weight;
        }
      }
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < nk; ++i)
        for (std::size_t j = 0; j < nm_; ++j)
          surface_[i * nm_ + j] += w * table[offset + i * stride_k + j * stride_m];
    }
  }

  double surface(double k, double m) const {
    const auto ck = k_axis_.locate(k);
    const auto cm = m_axis_.locate(m);
    const double* row0 = surface_.data() + static_cast<std::size_t>(ck.index) * nm_ + cm.index;
    const double* row1 = row0 + nm_;
    const double lo = (1.0 - cm.weight) * row0[0] + (cm.weight != 0.0 ? cm.weight * row0[1] : 0.0);
    if (ck.weight == 0.0) return lo;
    const double hi = (1.0 - cm.weight) * row1[0] + (cm.weight != 0.0 ? cm.weight * row1[1] : 0.0);
    return (1.0 - ck.weight) * lo + ck.weight * hi;
  }

  const ModelParams& params_;
  double gross_ = 0.0, sigma_ = 0.0, abatement_ = 0.0, damage_ = 0.0;
  double capital_kept_ = 0.0, dt_ = 0.0, population_ = 0.0, land_ = 0.0;
  double mat_kept_ = 0.0, emission_scale_ = 0.0, beta_ = 0.0;
  bool zero_ = true;
  Axis k_axis_, m_axis_;
  std::size_t nm_ = 0;
  std::vector<double> surface_;
};

struct Box {
  double mu_lo, mu_hi, s_lo, s_hi;
};

class AlternatingSearch {
 public:
  AlternatingSearch(const NodeObjective& f, const Box& box, const SolverSettings& settings)
      : f_(f), box_(box), settings_(settings) {}

  NodePolicy run(double mu, double s) {
    double r_mu = box_.mu_hi - box_.mu_lo;
    double r_s = box_.s_hi - box_.s_lo;
    double value = eval(mu, s);
    for (int sweep = 0; sweep < settings_.max_sweeps; ++sweep) {
      const double before = value;
      value = line(s, r_s, box_.s_lo, box_.s_hi, [&](double v) { return eval(mu, v); });
      // μ moves at fixed investment s·Q(μ): kinks of the capital interpolant are then axis-aligned
      const double invest = s * f_.net(mu);
      auto rate = [&](double m) { return std::clamp(invest / f_.net(m), box_.s_lo, box_.s_hi); };
      value = line(mu, r_mu, box_.mu_lo, box_.mu_hi, [&](double v) { return eval(v, rate(v)); });
      s = rate(mu);
      if (sweep > 0 && value - before <= settings_.tolerance * std::max(1.0, std::abs(value))) break;
    }
    NodePolicy out;
    out.mu = mu;
    out.savings = s;
    out.value = value;
    return out;
  }

  double eval(double mu, double s) {
    ++evaluations_;
    return f_(mu, s);
  }

  int evaluations() const { return evaluations_; }

 private:
  template <class G>
  double line(double& x, double& radius, double lo, double hi, G&& g) {
    if (hi <= lo) return g(lo);
    const double a = std::max(lo, x - radius);
    const double b = std::min(hi, x + radius);
    ScalarMax best = golden_maximize(g, a, b, settings_.tolerance);
    const double edge = 0.01 * (b - a);
    if ((best.x - a < edge && a > lo) || (b - best.x < edge && b < hi))
      best = golden_maximize(g, lo, hi, settings_.tolerance);
    radius = std::clamp(4.0 * std::abs(best.x - x), 1e-6, hi - lo);
    x = best.x;
    return best.value;
  }

  const NodeObjective& f_;
  Box box_;
  const SolverSettings& settings_;
  int evaluations_ = 0;
};

bool locally_optimal(AlternatingSearch& search, const NodePolicy& p, const Box& box, double h) {
  const double slack = 1e-12 * std::max(1.0, std::abs(p.value));
  for (int dm = -1; dm <= 1; ++dm) {
    for (int ds = -1; ds <= 1; ++ds) {
      if (dm == 0 && ds == 0) continue;
      const double mu = std::clamp(p.mu + dm * h, box.mu_lo, box.mu_hi);
      const double s = std::clamp(p.savings + ds * h, box.s_lo, box.s_hi);
      if (mu == p.mu && s == p.savings) continue;
      if (search.eval(mu, s) > p.value + slack) return false;
    }
  }
  return true;
}

}  // namespace

NodePolicy optimize_controls(const StateVector& state, int t, const Continuation& continuation,
                             const Problem& problem, const SolverSettings& settings,
                             std::optional<Seed> seed) {
  const auto& bounds = problem.params.controls;
  const Box box{bounds.mu_lower(t), bounds.mu_upper(t), bounds.savings_min, bounds.savings_max};
  const NodeObjective f(state, t, continuation, problem);

  NodePolicy best;
  if (continuation.zero()) {
    // utility is increasing in c and abatement only costs output
    best.mu = box.mu_lo;
    best.savings = box.s_lo;
    best.value = f(best.mu, best.savings);
    best.evaluations = 1;
  } else {
    AlternatingSearch search(f, box, settings);
    const Seed start = seed.value_or(Seed{0.5 * (box.mu_lo + box.mu_hi), 0.5 * (box.s_lo + box.s_hi)});
    best = search.run(std::clamp(start.mu, box.mu_lo, box.mu_hi),
                      std::clamp(start.savings, box.s_lo, box.s_hi));
    if (!locally_optimal(search, best, box, settings.perturbation)) {
      const int n = std::max(2, settings.fallback_scan);
      double scan_mu = best.mu, scan_s = best.savings, scan_v = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double mu = box.mu_lo + (box.mu_hi - box.mu_lo) * i / (n - 1);
          const double s = box.s_lo + (box.s_hi - box.s_lo) * j / (n - 1);
          const double v = search.eval(mu, s);
          if (v > scan_v) {
            scan_v = v;
            scan_mu = mu;
            scan_s = s;
          }
        }
      }
      const NodePolicy polished = search.run(scan_mu, scan_s);
      if (polished.value > best.value) best = polished;
      best.fallback = true;
    }
    best.evaluations = search.evaluations();
  }
  best.consumption = consumption_from_savings(f.net(best.mu), best.savings);
  return best;
}

Solution backward_induction(Grid grid, const Problem& problem, const SolverSettings& settings,
                            const ProgressCallback& progress) {
  const int n = problem.paths.periods();
  if (grid.periods() != n) throw std::invalid_argument("backward_induction: grid/paths horizon mismatch");

  Solution sol{std::move(grid), {}, {}, {}};
  const Grid& g = sol.grid;
  const std::size_t size = g.size();
  const std::size_t half = g.continuous_size();
  sol.values.period.assign(n + 1, std::vector<double>(size, 0.0));
  sol.policy.mu.assign(n + 1, std::vector<double>(size, 0.0));
  sol.policy.consumption.assign(n + 1, std::vector<double>(size, 0.0));
  sol.policy.savings.assign(n + 1, std::vector<double>(size, 0.0));

  // terminal convention at t = N
  for (std::size_t k = 0; k < size; ++k) {
    const StateVector s = g.node_state(n, k, problem.paths.productivity[n]);
    const Controls c = terminal_controls(s, n, problem.paths, problem.params, problem.shock);
    sol.policy.mu[n][k] = c.mu;
    sol.policy.consumption[n][k] = c.consumption;
    sol.policy.savings[n][k] = problem.params.controls.savings_min;
  }

  // with no shock effect the stressed slice equals the normal one
  const bool mirror = problem.shock.trivial();
  const std::size_t solve_size = mirror ? half : size;
  const std::size_t line = static_cast<std::size_t>(g.axes(0).back().size());
  const std::size_t lines = solve_size / line;
  const unsigned workers = std::max(1u, settings.workers);

  for (int t = n - 1; t >= 0; --t) {
    const auto started = std::chrono::steady_clock::now();
    const std::span<const double> next =
        t + 1 == n ? std::span<const double>{} : std::span<const double>(sol.values.period[t + 1]);
    const Continuation cont(g, t, next, problem.transition);
    auto& values = sol.values.period[t];
    auto& mu = sol.policy.mu[t];
    auto& cons = sol.policy.consumption[t];
    auto& sav = sol.policy.savings[t];

    std::atomic<std::size_t> next_line{0};
    std::atomic<std::size_t> fallbacks{0};
    std::atomic<long long> evaluations{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
      long long local_evals = 0;
      std::size_t local_fallbacks = 0;
      for (std::size_t l = next_line++; l < lines && !failed; l = next_line++) {
        std::optional<Seed> seed;
        for (std::size_t k = l * line; k < (l + 1) * line; ++k) {
          try {
            const StateVector s = g.node_state(t, k, problem.paths.productivity[t]);
            const NodePolicy p = optimize_controls(s, t, cont, problem, settings, seed);
            values[k] = p.value;
            mu[k] = p.mu;
            cons[k] = p.consumption;
            sav[k] = p.savings;
            seed = Seed{p.mu, p.savings};
            local_evals += p.evaluations;
            local_fallbacks += p.fallback ? 1 : 0;
            if (!std::isfinite(p.value)) throw std::domain_error("non-finite value");
          } catch (const std::exception& e) {
            std::lock_guard lock(error_mutex);
            if (!failed.exchange(true)) error = std::make_exception_ptr(SolverError(t, k, e.what()));
            return;
          }
        }
      }
      evaluations += local_evals;
      fallbacks += local_fallbacks;
    };

    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);

    if (mirror) {
      std::copy(values.begin(), values.begin() + half, values.begin() + half);
      std::copy(mu.begin(), mu.begin() + half, mu.begin() + half);
      std::copy(cons.begin(), cons.begin() + half, cons.begin() + half);
      std::copy(sav.begin(), sav.begin() + half, sav.begin() + half);
    }

    PeriodDiagnostics d;
    d.t = t;
    d.nodes = size;
    d.fallbacks = fallbacks;
    d.mean_evaluations = static_cast<double>(evaluations) / static_cast<double>(solve_size);
    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    sol.diagnostics.push_back(d);
    if (progress) progress(d);
  }
  std::reverse(sol.diagnostics.begin(), sol.diagnostics.end());
  return sol;
}

double value_at(const Solution& solution, int t, const StateVector& state) {
  const Grid& g = solution.grid;
  const std::size_t n = g.continuous_size();
  const auto x = g.coordinates(state);
  const auto& v = solution.values.period.at(t);
  return interpolate(std::span<const double>(v).subspan(index(state.regime) * n, n), g.axes(t),
                     std::span<const double>(x.data(), g.rank()));
}

void write_tables_csv(const Solution& solution, const ExogenousPaths& paths, std::ostream& out) {
  static constexpr const char* kDimNames[] = {"A", "K", "MAT", "MU", "ML", "TATM", "TOCEAN"};
  const Grid& g = solution.grid;
  out << "t,regime,node";
  for (Dim d : g.dims()) out << ',' << kDimNames[static_cast<int>(d)];
  out << ",V,MIU,C,S\n";
  const std::size_t n = g.continuous_size();
  for (int t = 0; t <= g.periods(); ++t) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      const StateVector s = g.node_state(t, k, paths.productivity[t]);
      out << t << ',' << index(s.regime) << ',' << k % n;
      for (Dim d : g.dims()) out << ',' << fmt::format("{}", coordinate(s, d));
      out << ',' << fmt::format("{},{},{},{}", solution.values.period[t][k], solution.policy.mu[t][k],
                                solution.policy.consumption[t][k], solution.policy.savings[t][k])
          << '\n';
    }
  }
}

}  // namespace sdice
