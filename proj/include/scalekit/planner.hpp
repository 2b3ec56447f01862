#pragma once

#include <vector>

#include "scalekit/laws.hpp"

namespace scalekit {

enum class ParamBasis { non_embedding, with_embedding };

struct FlopConvention {
  double multiplier = 6.0;
  ParamBasis param_basis = ParamBasis::non_embedding;
};

enum class AllocationMethod { closed_form, numeric };

struct Allocation {
  double compute = 0;
  double n_opt = 0;
  double d_opt = 0;
  double dn_ratio = 0;
  double predicted_loss = 0;
  AllocationMethod method = AllocationMethod::closed_form;
  bool boundary = false;    // no interior minimum in the bracket
  bool flat_basin = false;  // loss varies < 1e-5 across +-20% of n_opt
};

// with_embedding basis requires the caller's embedding-inclusive count.
double flops(double n, double d, const FlopConvention& conv = {}, double n_with_emb = 0);

Allocation chinchilla_optimal(const ChinchillaLaw& law, double compute,
                              const FlopConvention& conv = {});

struct Bracket {
  double n_lo = 1e7;
  double n_hi = 1e12;
};

// Coarse log grid then golden-section refinement; returns the lowest
// bracket-interior local minimum, or the better endpoint with the
// boundary flag when no interior minimum exists.
Allocation numeric_optimal(const LawHandle& law, double compute,
                           const FlopConvention& conv = {}, const Bracket& search = {});

struct FrontierPoint {
  double compute = 0;
  double dn_ratio = 0;
  double n_opt = 0;
  double d_opt = 0;
  double loss = 0;
};

std::vector<FrontierPoint> optimal_dn_curve(const LawHandle& law,
                                            const std::vector<double>& compute_grid,
                                            const FlopConvention& conv = {},
                                            const Bracket& search = {});

}  // namespace scalekit
