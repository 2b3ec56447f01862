#include "scalekit/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalekit/errors.hpp"
#include "scalekit/grid.hpp"

namespace scalekit {

std::vector<SweepPoint> plan_sweep(const SweepSpec& spec) {
  std::vector<double> n_values = spec.n_values;
  if (n_values.empty()) {
    if (spec.n_range.count < 1)
      throw ArgumentError("plan_sweep: give n_values or an n_range with count >= 1");
    n_values = log_spaced(spec.n_range.min, spec.n_range.max, spec.n_range.count);
  }
  for (double n : n_values)
    if (!(n > 0)) throw ArgumentError("plan_sweep: n values must be positive");
  if (spec.d_range.count < 1) throw ArgumentError("plan_sweep: d_range.count must be >= 1");
  const std::vector<double> d_values =
      log_spaced(spec.d_range.min, spec.d_range.max, spec.d_range.count);
  if (!(spec.dn_min < spec.dn_max))
    throw ArgumentError("plan_sweep: dn bounds must satisfy min < max");

  std::vector<SweepPoint> points;
  points.reserve(n_values.size() * d_values.size());
  for (double n : n_values)
    for (double d : d_values) {
      const double ratio = d / n;
      if (ratio >= spec.dn_min && ratio <= spec.dn_max) points.push_back({n, d});
    }
  std::sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.n != b.n ? a.n < b.n : a.d < b.d;
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const SweepPoint& a, const SweepPoint& b) {
                             return a.n == b.n && a.d == b.d;
                           }),
               points.end());
  if (points.empty())
    throw ArgumentError("plan_sweep: dn bounds prune every candidate point");
  return points;
}

void validate_arch(const ArchConfig& arch) {
  if (arch.d_model < 1 || arch.d_ff < 1 || arch.n_head < 1 || arch.n_layer < 1 ||
      arch.vocab < 1)
    throw ArgumentError("arch: all dimensions must be positive");
  if (arch.d_model % arch.n_head != 0)
    throw ArgumentError("arch: d_model must be divisible by n_head");
}

std::pair<std::int64_t, std::int64_t> count_params(const ArchConfig& arch) {
  validate_arch(arch);
  const std::int64_t dm = arch.d_model, dff = arch.d_ff, nl = arch.n_layer;
  // attention 4 dm^2, SwiGLU 3 dm dff, RMSNorm gains (2 per block + final)
  const std::int64_t n_params = nl * (4 * dm * dm + 3 * dm * dff) + (2 * nl + 1) * dm;
  const std::int64_t n_with_emb = n_params + 2 * static_cast<std::int64_t>(arch.vocab) * dm;
  return {n_params, n_with_emb};
}

const std::vector<ArchConfig>& canonical_family() {
  static const std::vector<ArchConfig> family = [] {
    // d_model, d_ff, heads, layers; head width 64 throughout
    const int dims[9][4] = {
        {1024, 2728, 16, 16}, {1152, 3032, 18, 18}, {1280, 3472, 20, 20},
        {1472, 3888, 23, 22}, {1600, 4264, 25, 26}, {1792, 4832, 28, 29},
        {2048, 5448, 32, 32}, {2304, 6064, 36, 36}, {2560, 6952, 40, 40},
    };
    std::vector<ArchConfig> rows;
    rows.reserve(9);
    for (const auto& d : dims) {
      ArchConfig arch;
      arch.d_model = d[0];
      arch.d_ff = d[1];
      arch.n_head = d[2];
      arch.n_layer = d[3];
      auto [n, n_emb] = count_params(arch);
      arch.n_params = n;
      arch.n_with_emb = n_emb;
      rows.push_back(arch);
    }
    return rows;
  }();
  return family;
}

ArchConfig derive_arch(double target_n) {
  if (!(target_n >= 1e8) || !(target_n <= 1e10))
    throw ArgumentError("derive_arch: target must lie in [1e8, 1e10]");
  const auto& family = canonical_family();
  const ArchConfig* best = &family.front();
  double best_dist = std::abs(std::log(target_n / static_cast<double>(best->n_params)));
  for (const auto& row : family) {
    const double dist = std::abs(std::log(target_n / static_cast<double>(row.n_params)));
    if (dist < best_dist) {
      best_dist = dist;
      best = &row;
    }
  }
  return *best;
}

namespace {

// accum minimal, then mbz maximal, then gpus minimal; gbz itself is
// never altered
std::optional<GpuPlan> find_gpu_plan(int gbz, int mbz_max, int gpu_step, int max_gpus) {
  for (int accum = 1; accum <= gbz; ++accum) {
    if (gbz % accum != 0) continue;
    const int per_step = gbz / accum;
    for (int mbz = std::min(mbz_max, per_step); mbz >= 1; --mbz) {
      if (per_step % mbz != 0) continue;
      const int gpus = per_step / mbz;
      if (gpus % gpu_step != 0) continue;
      if (max_gpus > 0 && gpus > max_gpus) continue;
      return GpuPlan{gbz, mbz, gpus, accum};
    }
  }
  return std::nullopt;
}

}  // namespace

GpuPlan plan_gpus(int gbz, int mbz_max, int gpu_step, int max_gpus) {
  if (gbz < 1 || mbz_max < 1 || gpu_step < 1)
    throw ArgumentError("plan_gpus: gbz, mbz_max, and gpu_step must be >= 1");
  if (max_gpus < 0) throw ArgumentError("plan_gpus: max_gpus must be >= 0");

  if (auto plan = find_gpu_plan(gbz, mbz_max, gpu_step, max_gpus)) return *plan;

  std::string near;
  int found = 0;
  for (int delta = 1; delta <= gbz && found < 2; ++delta) {
    for (int cand : {gbz - delta, gbz + delta}) {
      if (cand < 1 || found >= 2) continue;
      if (find_gpu_plan(cand, mbz_max, gpu_step, max_gpus)) {
        near += (near.empty() ? "" : ", ") + std::to_string(cand);
        ++found;
      }
    }
  }
  throw InfeasibleError("plan_gpus: no exact factorization of gbz=" + std::to_string(gbz) +
                        (near.empty() ? "" : "; nearest feasible gbz: " + near));
}

}  // namespace scalekit
