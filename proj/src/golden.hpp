#pragma once

#include <cmath>
#include <functional>

namespace scalekit::detail {

// Golden-section minimum of f on [lo, hi] to |hi - lo| <= rel_tol * |mid|.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double rel_tol, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > rel_tol * std::abs(a + b) * 0.5; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace scalekit::detail
