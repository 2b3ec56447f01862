#include "scalekit/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "golden.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/grid.hpp"

namespace scalekit {

namespace {

void check_flat_basin(const LawHandle& law, double compute, double multiplier,
                      Allocation* alloc) {
  // flat when loss moves < 1e-5 across +-20% of n_opt
  const auto loss_at = [&](double n) { return eval(law, n, compute / (multiplier * n)); };
  const double lo = loss_at(alloc->n_opt * 0.8);
  const double hi = loss_at(alloc->n_opt * 1.2);
  const double span = std::max({lo, hi, alloc->predicted_loss}) -
                      std::min({lo, hi, alloc->predicted_loss});
  alloc->flat_basin = span < 1e-5;
}

}  // namespace

double flops(double n, double d, const FlopConvention& conv, double n_with_emb) {
  if (!(n >= 1) || !(d >= 1)) throw ArgumentError("flops: n and d must be >= 1");
  if (!(conv.multiplier > 0)) throw ArgumentError("flops: multiplier must be positive");
  if (conv.param_basis == ParamBasis::with_embedding) {
    if (!(n_with_emb >= 1))
      throw ArgumentError(
          "flops: with_embedding basis requires an embedding-inclusive parameter count");
    return conv.multiplier * n_with_emb * d;
  }
  return conv.multiplier * n * d;
}

Allocation chinchilla_optimal(const ChinchillaLaw& law, double compute,
                              const FlopConvention& conv) {
  if (!(compute > 0)) throw ArgumentError("chinchilla_optimal: compute must be positive");
  if (!(law.exp_a > 0) || !(law.exp_b > 0) || !(law.coef_a > 0) || !(law.coef_b > 0))
    throw EvalError(
        "chinchilla_optimal: closed form needs positive coefficients and exponents");
  if (conv.param_basis == ParamBasis::with_embedding)
    throw ArgumentError(
        "allocation search is defined on non-embedding counts; use the non_embedding basis");

  const double a = law.exp_a, b = law.exp_b;
  const double n_opt = std::pow(a * law.coef_a / (b * law.coef_b), 1.0 / (a + b)) *
                       std::pow(compute / conv.multiplier, b / (a + b));
  Allocation out;
  out.compute = compute;
  out.method = AllocationMethod::closed_form;
  out.n_opt = n_opt;
  out.d_opt = compute / (conv.multiplier * n_opt);
  out.dn_ratio = out.d_opt / out.n_opt;
  LawHandle handle{law, ""};
  out.predicted_loss = eval_chinchilla(law, n_opt, out.d_opt);
  check_flat_basin(handle, compute, conv.multiplier, &out);
  return out;
}

Allocation numeric_optimal(const LawHandle& law, double compute, const FlopConvention& conv,
                           const Bracket& search) {
  if (!(compute > 0)) throw ArgumentError("numeric_optimal: compute must be positive");
  if (!(search.n_lo >= 1) || !(search.n_hi / search.n_lo >= 10))
    throw ArgumentError("numeric_optimal: bracket must start >= 1 and span >= 1 decade");
  if (conv.param_basis == ParamBasis::with_embedding)
    throw ArgumentError(
        "allocation search is defined on non-embedding counts; use the non_embedding basis");

  const auto loss_at = [&](double n) {
    const double d = compute / (conv.multiplier * n);
    if (!(d >= 1)) return std::numeric_limits<double>::infinity();
    return eval(law, n, d);
  };

  constexpr int kGridPoints = 256;
  const std::vector<double> grid = log_spaced(search.n_lo, search.n_hi, kGridPoints);
  std::vector<double> ls(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    // d < 1 marks the point as out of range rather than failing the scan
    const double d = compute / (conv.multiplier * grid[i]);
    if (d >= 1) {
      ls[i] = eval(law, grid[i], d);
      if (!std::isfinite(ls[i]))
        throw EvalError("numeric_optimal: non-finite loss at n = " + std::to_string(grid[i]));
    } else {
      ls[i] = std::numeric_limits<double>::infinity();
    }
  }

  // interior local minima only; the bracket edge never wins silently
  double best_n = 0, best_loss = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i + 1 < grid.size(); ++i) {
    const bool basin = ls[i] <= ls[i - 1] && ls[i] <= ls[i + 1] &&
                       (ls[i] < ls[i - 1] || ls[i] < ls[i + 1]);
    if (!basin) continue;
    // 1e-8 on ln n keeps n itself within relative 1e-6 comfortably
    const double n_ref = detail::golden_min([&](double ln_n) { return loss_at(std::exp(ln_n)); },
                                            std::log(grid[i - 1]), std::log(grid[i + 1]), 1e-8);
    const double n_star = std::exp(n_ref);
    const double l_star = loss_at(n_star);
    if (l_star < best_loss) {
      best_loss = l_star;
      best_n = n_star;
    }
  }

  Allocation out;
  out.compute = compute;
  out.method = AllocationMethod::numeric;
  if (best_n > 0) {
    out.n_opt = best_n;
    out.predicted_loss = best_loss;
  } else {
    const size_t edge = ls.front() <= ls.back() ? 0 : grid.size() - 1;
    out.n_opt = grid[edge];
    out.predicted_loss = ls[edge];
    out.boundary = true;
    if (!std::isfinite(out.predicted_loss))
      throw EvalError("numeric_optimal: no feasible point in the bracket");
  }
  out.d_opt = compute / (conv.multiplier * out.n_opt);
  out.dn_ratio = out.d_opt / out.n_opt;
  check_flat_basin(law, compute, conv.multiplier, &out);
  return out;
}

std::vector<FrontierPoint> optimal_dn_curve(const LawHandle& law,
                                            const std::vector<double>& compute_grid,
                                            const FlopConvention& conv, const Bracket& search) {
  if (compute_grid.size() < 2)
    throw ArgumentError("optimal_dn_curve: need at least 2 compute budgets");
  for (size_t i = 1; i < compute_grid.size(); ++i)
    if (!(compute_grid[i] > compute_grid[i - 1]))
      throw ArgumentError("optimal_dn_curve: budgets must be strictly increasing");

  std::vector<FrontierPoint> out;
  out.reserve(compute_grid.size());
  for (double c : compute_grid) {
    const Allocation alloc = law.family() == LawFamily::chinchilla
                                 ? chinchilla_optimal(law.chinchilla(), c, conv)
                                 : numeric_optimal(law, c, conv, search);
    out.push_back({c, alloc.dn_ratio, alloc.n_opt, alloc.d_opt, alloc.predicted_loss});
  }
  return out;
}

}  // namespace scalekit
