#pragma once

#include <cmath>
#include <utility>

namespace sdice {

struct ScalarMax {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section maximization of `f` on [lo, hi] until the bracket is
/// narrower than `tol`. The endpoints are evaluated too, so a maximum on
/// the boundary is returned exactly.
template <class F>
ScalarMax golden_maximize(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  if (!(hi > lo)) return {lo, f(lo), 1};

  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++evals;
  }

  ScalarMax best = fc >= fd ? ScalarMax{c, fc, 0} : ScalarMax{d, fd, 0};
  const double flo = f(lo);
  const double fhi = f(hi);
  evals += 2;
  if (flo > best.value) best = {lo, flo, 0};
  if (fhi > best.value) best = {hi, fhi, 0};
  best.evaluations = evals;
  return best;
}

}  // namespace sdice
