#include "sdice/grid.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace sdice {

double coordinate(const StateVector& s, Dim d) {
  switch (d) {
    case Dim::productivity: return s.productivity;
    case Dim::capital: return s.capital;
    case Dim::mat: return s.carbon[0];
    case Dim::mup: return s.carbon[1];
    case Dim::mlo: return s.carbon[2];
    case Dim::tat: return s.temperature[0];
    case Dim::tlo: return s.temperature[1];
  }
  return 0.0;
}

void set_coordinate(StateVector& s, Dim d, double v) {
  switch (d) {
    case Dim::productivity: s.productivity = v; break;
    case Dim::capital: s.capital = v; break;
    case Dim::mat: s.carbon[0] = v; break;
    case Dim::mup: s.carbon[1] = v; break;
    case Dim::mlo: s.carbon[2] = v; break;
    case Dim::tat: s.temperature[0] = v; break;
    case Dim::tlo: s.temperature[1] = v; break;
  }
}

Axis::Axis(double lo, double hi, int count, bool extrapolate)
    : lo_(lo), hi_(hi), count_(count), extrapolate_(extrapolate) {
  if (count < 2) throw std::invalid_argument(fmt::format("axis needs at least 2 nodes, got {}", count));
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument(fmt::format("axis range [{}, {}] is degenerate", lo, hi));
  step_ = (hi - lo) / (count - 1);
}

Axis::Cell Axis::locate(double x) const {
  if (!std::isfinite(x)) throw std::domain_error("interpolate: non-finite coordinate");
  if (x <= lo_) return {0, extrapolate_ ? (x - lo_) / step_ : 0.0};
  if (x >= hi_) return {count_ - 2, extrapolate_ ? 1.0 + (x - hi_) / step_ : 1.0};
  const double u = (x - lo_) / step_;
  // snap onto nodes so that node values are reproduced bit-exactly
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-12) {
    const int i = static_cast<int>(nearest);
    return i >= count_ - 1 ? Cell{count_ - 2, 1.0} : Cell{i, 0.0};
  }
  int i = static_cast<int>(u);
  if (i > count_ - 2) i = count_ - 2;
  return {i, u - i};
}

double interpolate(std::span<const double> table, std::span<const Axis> axes,
                   std::span<const double> x) {
  const std::size_t d = axes.size();
  if (x.size() != d) throw std::invalid_argument("interpolate: dimension mismatch");

  std::array<std::size_t, kMaxDims> stride{};
  std::array<Axis::Cell, kMaxDims> cell{};
  std::size_t size = 1;
  for (std::size_t k = d; k-- > 0;) {
    stride[k] = size;
    size *= static_cast<std::size_t>(axes[k].size());
  }
  if (table.size() < size) throw std::invalid_argument("interpolate: table too small");

  std::size_t base = 0;
  for (std::size_t k = 0; k < d; ++k) {
    cell[k] = axes[k].locate(x[k]);
    base += static_cast<std::size_t>(cell[k].index) * stride[k];
  }

  double total = 0.0;
  const std::size_t corners = std::size_t{1} << d;
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t offset = base;
    for (std::size_t k = 0; k < d; ++k) {
      if (c >> k & 1U) {
        w *= cell[k].weight;
        offset += stride[k];
      } else {
        w *= 1.0 - cell[k].weight;
      }
    }
    if (w != 0.0) total += w * table[offset];
  }
  return total;
}

Grid::Grid(std::vector<Dim> dims, std::vector<std::vector<Axis>> axes)
    : dims_(std::move(dims)), axes_(std::move(axes)) {
  if (dims_.empty() || dims_.size() > kMaxDims) throw std::invalid_argument("grid: bad dimension count");
  if (axes_.empty()) throw std::invalid_argument("grid: no periods");
  for (const auto& period : axes_) {
    if (period.size() != dims_.size()) throw std::invalid_argument("grid: axis count mismatch");
    for (std::size_t k = 0; k < dims_.size(); ++k)
      if (period[k].size() != axes_[0][k].size())
        throw std::invalid_argument("grid: node counts must not vary across periods");
  }
  std::size_t size = 1;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    strides_[k] = size;
    size *= static_cast<std::size_t>(axes_[0][k].size());
  }
  continuous_size_ = size;
}

int Grid::position(Dim d) const {
  for (std::size_t k = 0; k < dims_.size(); ++k)
    if (dims_[k] == d) return static_cast<int>(k);
  return -1;
}

const Axis& Grid::axis(int t, Dim d) const {
  const int k = position(d);
  if (k < 0) throw std::invalid_argument("grid: dimension not present");
  return axes_.at(t)[k];
}

StateVector Grid::node_state(int t, std::size_t flat, double baseline_productivity) const {
  StateVector s;
  s.productivity = baseline_productivity;
  s.regime = flat >= continuous_size_ ? Regime::stressed : Regime::normal;
  std::size_t rest = flat % continuous_size_;
  const auto& ax = axes_.at(t);
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const std::size_t i = rest / strides_[k];
    rest %= strides_[k];
    set_coordinate(s, dims_[k], ax[k].node(static_cast<int>(i)));
  }
  return s;
}

std::array<double, kMaxDims> Grid::coordinates(const StateVector& s) const {
  std::array<double, kMaxDims> x{};
  for (std::size_t k = 0; k < dims_.size(); ++k) x[k] = coordinate(s, dims_[k]);
  return x;
}

Grid build_grid(const std::vector<PeriodRanges>& ranges, const GridSpec& spec,
                const ShockSpec& shock) {
  if (ranges.empty()) throw std::invalid_argument("build_grid: no ranges");
  std::vector<Dim> dims;
  if (shock.persistent) dims.push_back(Dim::productivity);
  for (Dim d : {Dim::capital, Dim::mat, Dim::mup, Dim::mlo, Dim::tat, Dim::tlo}) dims.push_back(d);

  std::vector<std::vector<Axis>> axes;
  axes.reserve(ranges.size());
  for (const auto& r : ranges) {
    std::vector<Axis> period;
    for (Dim d : dims) {
      switch (d) {
        case Dim::productivity: period.emplace_back(r.productivity.lo, r.productivity.hi, spec.productivity_nodes); break;
        case Dim::capital: period.emplace_back(r.capital.lo, r.capital.hi, spec.capital_nodes, spec.extrapolate_capital); break;
        case Dim::mat: period.emplace_back(r.carbon[0].lo, r.carbon[0].hi, spec.other_nodes); break;
        case Dim::mup: period.emplace_back(r.carbon[1].lo, r.carbon[1].hi, spec.other_nodes); break;
        case Dim::mlo: period.emplace_back(r.carbon[2].lo, r.carbon[2].hi, spec.other_nodes); break;
        case Dim::tat: period.emplace_back(r.temperature[0].lo, r.temperature[0].hi, spec.other_nodes); break;
        case Dim::tlo: period.emplace_back(r.temperature[1].lo, r.temperature[1].hi, spec.other_nodes); break;
      }
    }
    axes.push_back(std::move(period));
  }
  return Grid(std::move(dims), std::move(axes));
}

}  // namespace sdice
