#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "scalekit/fit.hpp"
#include "scalekit/laws.hpp"
#include "scalekit/sweep.hpp"

namespace fixtures {

// Bundled coefficient sets; values mirror data/laws/*.json.
inline scalekit::ChinchillaLaw chinchilla_code() {
  return {0.2193, 534.374, 0.4853, 76.0743, 0.2983};
}

inline scalekit::FarseerLaw farseer_code() {
  return {-0.004667358, 0.23888406, -0.81878835, 62.893611, -0.06140843,
          -14.041389,   -0.020899029, 0.19430446, -0.1826114};
}

inline scalekit::LawHandle chinchilla_handle() { return {chinchilla_code(), "fixture"}; }
inline scalekit::LawHandle farseer_handle() { return {farseer_code(), "fixture"}; }

// Held-out validation runs with their published predictions and relative
// errors (permille).
struct ValidationRow {
  double n, d;
  double pl_f, pl_c;  // predicted loss per family
  double loss;        // measured
  double re_f, re_c;  // permille
  int gbz, gpus, mbz;
};

inline const std::array<ValidationRow, 3>& validation_rows() {
  static const std::array<ValidationRow, 3> rows = {{
      {6.37e9, 127e9, 0.259271, 0.265707, 0.256833, 9.49, 34.55, 640, 160, 2},
      {2.27e9, 341e9, 0.253488, 0.262330, 0.253786, 1.17, 33.67, 1080, 120, 9},
      {1.34e9, 567e9, 0.255846, 0.262939, 0.258546, 10.44, 16.99, 1456, 112, 13},
  }};
  return rows;
}

inline std::vector<scalekit::RunRecord> validation_records() {
  std::vector<scalekit::RunRecord> out;
  for (const auto& row : validation_rows()) out.push_back({row.n, row.d, row.loss, "", {}});
  return out;
}

// Box-Muller on hand-mapped mt19937_64 draws, identical across platforms.
inline double normal01(std::mt19937_64& gen) {
  double u1 = (gen() >> 11) * 0x1.0p-53;
  const double u2 = (gen() >> 11) * 0x1.0p-53;
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// The canonical 9 x 13 training grid: family sizes crossed with 13
// log-spaced token budgets in [2e9, 128e9].
inline std::vector<scalekit::SweepPoint> canonical_grid() {
  scalekit::SweepSpec spec;
  for (const auto& arch : scalekit::canonical_family())
    spec.n_values.push_back(static_cast<double>(arch.n_params));
  spec.d_range = {2e9, 128e9, 13};
  spec.dn_min = 0.5;
  spec.dn_max = 650;
  return scalekit::plan_sweep(spec);
}

inline std::vector<scalekit::RunRecord> synthetic_records(const scalekit::LawHandle& law,
                                                          double noise_sigma = 0,
                                                          std::uint64_t seed = 0) {
  std::mt19937_64 gen(seed);
  std::vector<scalekit::RunRecord> out;
  for (const auto& pt : canonical_grid()) {
    double loss = scalekit::eval(law, pt.n, pt.d);
    if (noise_sigma > 0) loss *= std::exp(noise_sigma * normal01(gen));
    out.push_back({pt.n, pt.d, loss, "", {}});
  }
  return out;
}

}  // namespace fixtures
