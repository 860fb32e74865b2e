#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sdice/model.hpp"
#include "sdice/reference.hpp"

namespace sdice {

/// Continuous state coordinates in canonical order. Productivity is only
/// part of the grid when shocks are persistent.
enum class Dim { productivity, capital, mat, mup, mlo, tat, tlo };

inline constexpr std::size_t kMaxDims = 7;

double coordinate(const StateVector& s, Dim d);
void set_coordinate(StateVector& s, Dim d, double v);

/// Equally spaced nodes lo = x_0 < ... < x_{n-1} = hi. Points outside
/// [lo, hi] are clamped, or continued along the end cells when
/// `extrapolate` is set.
class Axis {
 public:
  Axis() = default;
  Axis(double lo, double hi, int count, bool extrapolate = false);

  int size() const { return count_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double spacing() const { return step_; }
  double node(int i) const { return i == count_ - 1 ? hi_ : lo_ + step_ * i; }
  bool extrapolates() const { return extrapolate_; }

  /// Cell and upper weight with x = (1 - w) node(i) + w node(i + 1); w lies
  /// in [0, 1] unless the axis extrapolates.
  struct Cell {
    int index;
    double weight;
  };
  Cell locate(double x) const;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  double step_ = 0.0;
  int count_ = 0;
  bool extrapolate_ = false;
};

/// Multilinear interpolation on a row-major tensor table (last axis
/// fastest); `x` is clamped into the bounding box along axes that do not
/// extrapolate.
double interpolate(std::span<const double> table, std::span<const Axis> axes,
                   std::span<const double> x);

struct GridSpec {
  int capital_nodes = 9;
  int other_nodes = 5;
  int productivity_nodes = 9;
  bool extrapolate_capital = true;
};

/// Per-period tensor grid over the continuous states plus the two-valued
/// regime. Flat index = regime * continuous_size() + row-major offset.
class Grid {
 public:
  Grid(std::vector<Dim> dims, std::vector<std::vector<Axis>> axes);

  const std::vector<Dim>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  int periods() const { return static_cast<int>(axes_.size()) - 1; }
  std::span<const Axis> axes(int t) const { return axes_.at(t); }
  const Axis& axis(int t, Dim d) const;
  /// Position of `d` in dims(), or -1.
  int position(Dim d) const;

  std::size_t continuous_size() const { return continuous_size_; }
  std::size_t size() const { return kRegimeCount * continuous_size_; }
  std::size_t stride(std::size_t position) const { return strides_[position]; }

  /// Node coordinates; productivity falls back to `baseline_productivity`
  /// when it is not a grid dimension.
  StateVector node_state(int t, std::size_t flat, double baseline_productivity) const;

  /// Coordinates of a state in dims() order.
  std::array<double, kMaxDims> coordinates(const StateVector& s) const;

 private:
  std::vector<Dim> dims_;
  std::vector<std::vector<Axis>> axes_;
  std::array<std::size_t, kMaxDims> strides_{};
  std::size_t continuous_size_ = 0;
};

Grid build_grid(const std::vector<PeriodRanges>& ranges, const GridSpec& spec,
                const ShockSpec& shock);

}  // namespace sdice
