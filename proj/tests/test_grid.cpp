#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sdice/grid.hpp"
#include "support.hpp"

using namespace sdice;
using doctest::Approx;

namespace {

struct RangeFixture {
  ModelParams params;
  ExogenousPaths paths = build_exogenous_paths(params);
  ReferenceTrajectory ref = test::synthetic_reference(params, paths);
  std::vector<PeriodRanges> ranges = grid_ranges_from_reference(ref, paths);
};

std::vector<Axis> unit_axes(std::size_t d, int nodes) {
  std::vector<Axis> axes;
  for (std::size_t k = 0; k < d; ++k) axes.emplace_back(-1.0 + k, 2.0 + 1.5 * k, nodes);
  return axes;
}

/// Fills a row-major table with f evaluated at the nodes.
template <class F>
std::vector<double> tabulate(const std::vector<Axis>& axes, F f) {
  std::size_t size = 1;
  for (const auto& a : axes) size *= a.size();
  std::vector<double> table(size);
  std::vector<double> x(axes.size());
  for (std::size_t flat = 0; flat < size; ++flat) {
    std::size_t rest = flat;
    for (std::size_t k = axes.size(); k-- > 0;) {
      x[k] = axes[k].node(static_cast<int>(rest % axes[k].size()));
      rest /= axes[k].size();
    }
    table[flat] = f(x);
  }
  return table;
}

}  // namespace

TEST_CASE_FIXTURE(RangeFixture, "ranges follow the reference path") {
  CHECK(ranges.size() == 81);
  CHECK(ranges[0].capital.lo == Approx(133.8).epsilon(1e-14));
  CHECK(ranges[0].capital.hi == Approx(312.2).epsilon(1e-14));
  for (const auto& r : ranges) {
    CHECK(r.temperature[0].lo == 0.0);
    CHECK(r.temperature[1].lo == 0.0);
  }
  CHECK(ranges[0].productivity.lo == Approx(3.069).epsilon(1e-14));
  CHECK(ranges[0].productivity.hi == 5.115);
  for (int t = 0; t <= 80; ++t)
    CHECK(ranges[t].capital.lo == Approx(0.6 * ref.path.states[t].capital).epsilon(1e-14));
}

TEST_CASE_FIXTURE(RangeFixture, "default grid size and spacing") {
  const Grid g = build_grid(ranges, GridSpec{}, ShockSpec{});
  CHECK(g.size() == 56250);
  CHECK(g.rank() == 6);
  CHECK(g.axis(0, Dim::capital).spacing() == Approx(22.3).epsilon(1e-14));
  CHECK(g.axis(0, Dim::capital).node(8) == g.axis(0, Dim::capital).hi());
  const Grid persistent = build_grid(ranges, GridSpec{}, ShockSpec{0.01, 0.05, 0.05, true});
  CHECK(persistent.size() == 56250 * 9);
  CHECK(persistent.dims().front() == Dim::productivity);
}

TEST_CASE_FIXTURE(RangeFixture, "a one-node dimension is rejected") {
  CHECK_THROWS_AS(build_grid(ranges, GridSpec{1, 5, 9}, ShockSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(ranges, GridSpec{9, 1, 9}, ShockSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(Axis(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Axis(1.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE_FIXTURE(RangeFixture, "node states round-trip through coordinates") {
  const Grid g = build_grid(ranges, GridSpec{3, 2, 3}, ShockSpec{});
  std::vector<double> table(g.continuous_size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = std::sin(0.37 * i);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const StateVector s = g.node_state(7, flat, 1.0);
    CHECK((s.regime == Regime::stressed) == (flat >= g.continuous_size()));
    const auto x = g.coordinates(s);
    CHECK(interpolate(table, g.axes(7), std::span<const double>(x.data(), g.rank())) ==
          table[flat % g.continuous_size()]);
  }
}

TEST_CASE("interpolation is exact at nodes") {
  for (std::size_t d : {1u, 3u, 6u}) {
    const auto axes = unit_axes(d, d == 6 ? 3 : 5);
    std::mt19937_64 rng(d);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    const auto table = tabulate(axes, [&](const std::vector<double>&) { return u(rng); });
    const auto again = tabulate(axes, [&](const std::vector<double>& x) { return interpolate(table, axes, x); });
    CHECK(again == table);
  }
}

TEST_CASE("interpolation reproduces affine functions") {
  for (std::size_t d = 1; d <= 7; ++d) {
    const auto axes = unit_axes(d, 3);
    auto f = [](const std::vector<double>& x) {
      double v = 0.5;
      for (std::size_t k = 0; k < x.size(); ++k) v += (k % 2 ? 3.0 : -2.0) * (k + 1) * x[k];
      return v;
    };
    const auto table = tabulate(axes, f);
    std::mt19937_64 rng(42 + d);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(d);
      for (std::size_t k = 0; k < d; ++k)
        x[k] = std::uniform_real_distribution<double>(axes[k].lo(), axes[k].hi())(rng);
      CHECK(interpolate(table, axes, x) == Approx(f(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpolation of 3K + 2T over the model grid") {
  ModelParams params;
  params.periods = 4;
  const auto paths = build_exogenous_paths(params);
  const auto ref = test::synthetic_reference(params, paths);
  const Grid g = build_grid(grid_ranges_from_reference(ref, paths), GridSpec{3, 3, 3}, ShockSpec{});
  std::vector<double> table(g.continuous_size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const StateVector s = g.node_state(2, i, 1.0);
    table[i] = 3.0 * s.capital + 2.0 * s.tat();
  }
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    StateVector s;
    for (std::size_t k = 0; k < g.rank(); ++k) {
      const Axis& a = g.axes(2)[k];
      set_coordinate(s, g.dims()[k], std::uniform_real_distribution<double>(a.lo(), a.hi())(rng));
    }
    const auto x = g.coordinates(s);
    CHECK(interpolate(table, g.axes(2), std::span<const double>(x.data(), g.rank())) ==
          Approx(3.0 * s.capital + 2.0 * s.tat()).epsilon(1e-12));
  }
}

TEST_CASE("box midpoint gives the corner average") {
  for (std::size_t d = 1; d <= 7; ++d) {
    const auto axes = unit_axes(d, 2);
    std::mt19937_64 rng(d);
    std::vector<double> table(std::size_t{1} << d);
    double sum = 0.0;
    for (double& v : table) {
      v = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
      sum += v;
    }
    std::vector<double> mid(d);
    for (std::size_t k = 0; k < d; ++k) mid[k] = 0.5 * (axes[k].lo() + axes[k].hi());
    CHECK(interpolate(table, axes, mid) == Approx(sum / table.size()).epsilon(1e-13));
  }
}

TEST_CASE("out-of-box points clamp or extrapolate") {
  const std::vector<Axis> clamped{Axis(0.0, 2.0, 3)};
  const std::vector<Axis> linear{Axis(0.0, 2.0, 3, true)};
  const std::vector<double> table{1.0, 3.0, 4.0};
  const double below = -1.0, above = 3.0;
  CHECK(interpolate(table, clamped, std::span(&below, 1)) == 1.0);
  CHECK(interpolate(table, clamped, std::span(&above, 1)) == 4.0);
  CHECK(interpolate(table, linear, std::span(&below, 1)) == -1.0);
  CHECK(interpolate(table, linear, std::span(&above, 1)) == 5.0);
  const double bad = std::nan("");
  CHECK_THROWS_AS(interpolate(table, clamped, std::span(&bad, 1)), std::domain_error);
}
