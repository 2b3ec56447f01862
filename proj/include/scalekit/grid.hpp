#pragma once

#include <cmath>
#include <vector>

#include "scalekit/errors.hpp"

namespace scalekit {

// Inclusive log-spaced grid. count == 1 yields {lo}.
inline std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > 0) || lo > hi)
    throw ArgumentError("log_spaced: need 0 < lo <= hi");
  if (count < 1) throw ArgumentError("log_spaced: count must be >= 1");
  if (count == 1) return {lo};
  if (lo == hi) throw ArgumentError("log_spaced: lo == hi needs count == 1");
  std::vector<double> out(static_cast<size_t>(count));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace scalekit
