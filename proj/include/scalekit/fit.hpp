#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scalekit/errors.hpp"
#include "scalekit/laws.hpp"

namespace scalekit {

enum class FitObjective { huber_log, mean_relative_error };

struct Interval {
  double lo = 0;
  double hi = 0;
};

struct FitConfig {
  LawFamily family = LawFamily::chinchilla;
  FitObjective objective = FitObjective::huber_log;
  double huber_delta = 1e-3;
  int n_starts = 64;
  int max_iters = 2000;
  std::uint64_t seed = 0;
  std::vector<Interval> bounds;  // empty selects default_bounds(family)
};

std::vector<Interval> default_bounds(LawFamily family);

struct Residual {
  double predicted = 0;
  double actual = 0;
  double re_permille = 0;
};

struct FitReport {
  LawHandle law;
  double mre_permille = 0;
  std::vector<Residual> residuals;  // fit(): (n, d)-sorted order; score(): input order
  double objective_value = 0;
  int starts_converged = 0;
  int best_start_index = -1;
};

struct FitError : std::runtime_error {
  FitError(const std::string& msg, FitReport best)
      : std::runtime_error(msg), best_candidate(std::move(best)) {}
  FitReport best_candidate;
};

// 1000 * |predicted - actual| / actual
double relative_error(double predicted, double actual);

FitReport fit(const std::vector<RunRecord>& records, const FitConfig& config);

// Evaluate without refitting.
FitReport score(const LawHandle& law, const std::vector<RunRecord>& records);

}  // namespace scalekit
