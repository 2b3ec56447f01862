#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "scalekit/laws.hpp"

namespace scalekit {

struct GridRange {
  double min = 0;
  double max = 0;
  int count = 0;
};

struct SweepSpec {
  std::vector<double> n_values;  // explicit sizes; empty means use n_range
  GridRange n_range;
  GridRange d_range;
  double dn_min = 0;
  double dn_max = 0;
  std::optional<std::int64_t> target_total;
};

struct SweepPoint {
  double n = 0;
  double d = 0;
};

// Cartesian product pruned to dn_min <= d/n <= dn_max (inclusive),
// sorted by (n, d), duplicates removed.
std::vector<SweepPoint> plan_sweep(const SweepSpec& spec);

struct ArchConfig {
  static constexpr int kDefaultVocab = 65430;  // inferred from the published family

  int d_model = 0;
  int d_ff = 0;
  int n_head = 0;
  int n_layer = 0;
  std::int64_t n_params = 0;
  std::int64_t n_with_emb = 0;
  int vocab = kDefaultVocab;
};

void validate_arch(const ArchConfig& arch);

// SwiGLU blocks with RMSNorm gains, untied embeddings, no biases.
std::pair<std::int64_t, std::int64_t> count_params(const ArchConfig& arch);

// The canonical 9-model family (dims only; counts filled by count_params).
const std::vector<ArchConfig>& canonical_family();

// Nearest family row by log-distance in non-embedding parameter count.
ArchConfig derive_arch(double target_n);

struct GpuPlan {
  int gbz = 0;
  int mbz = 0;
  int gpus = 0;
  int accum = 0;
};

// Exact factorization gpus * mbz * accum == gbz with gpus divisible by
// gpu_step, preferring minimal accum, then maximal mbz, then minimal gpus.
// max_gpus == 0 means unbounded.
GpuPlan plan_gpus(int gbz, int mbz_max, int gpu_step = 8, int max_gpus = 0);

}  // namespace scalekit
