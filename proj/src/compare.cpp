#include "scalekit/compare.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "scalekit/errors.hpp"
#include "scalekit/grid.hpp"

namespace scalekit {

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo) {
  // relative 1e-9 on the ratio axis
  while ((hi - lo) > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (f_lo > 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CrossoverScan crossover_dn(const LawHandle& law_a, const LawHandle& law_b, double n,
                           const DnRange& dn_range, double tol, int grid_points) {
  if (!(n >= 1)) throw ArgumentError("crossover_dn: n must be >= 1");
  if (!(dn_range.lo > 0) || !(dn_range.lo < dn_range.hi))
    throw ArgumentError("crossover_dn: dn range must be positive and ordered");
  if (!(tol > 0)) throw ArgumentError("crossover_dn: tol must be positive");
  if (grid_points < 3) throw ArgumentError("crossover_dn: need at least 3 grid points");

  const auto f = [&](double r) {
    const double d = r * n;
    const double la = eval(law_a, n, d);
    const double lb = eval(law_b, n, d);
    if (!std::isfinite(la) || !std::isfinite(lb))
      throw EvalError("crossover_dn: non-finite surface value at dn = " + std::to_string(r));
    return la - lb;
  };

  const std::vector<double> grid = log_spaced(dn_range.lo, dn_range.hi, grid_points);
  std::vector<double> fs(grid.size());
  double max_abs = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    fs[i] = f(grid[i]);
    max_abs = std::max(max_abs, std::abs(fs[i]));
  }

  CrossoverScan out;
  if (max_abs <= tol) {
    out.identical = true;
    return out;
  }

  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    if (fs[i] == 0) {
      if (out.roots.empty() || out.roots.back() != grid[i]) out.roots.push_back(grid[i]);
      continue;
    }
    if ((fs[i] > 0) != (fs[i + 1] > 0) && fs[i + 1] != 0)
      out.roots.push_back(bisect(f, grid[i], grid[i + 1], fs[i]));
  }
  if (fs.back() == 0) out.roots.push_back(grid.back());

  // |f| dips below tol without a sign change: tangency candidates that
  // bisection cannot certify
  for (size_t i = 1; i + 1 < grid.size(); ++i) {
    if (std::abs(fs[i]) < tol && std::abs(fs[i]) <= std::abs(fs[i - 1]) &&
        std::abs(fs[i]) <= std::abs(fs[i + 1]) && (fs[i - 1] > 0) == (fs[i + 1] > 0) &&
        fs[i] != 0) {
      bool near_root = false;
      for (double r : out.roots)
        near_root |= std::abs(std::log(r / grid[i])) < 2.0 * std::log(grid[1] / grid[0]);
      if (!near_root) out.touches.push_back(grid[i]);
    }
  }
  return out;
}

DominanceReport dominance_map(const LawSet& set, const std::vector<double>& n_grid,
                              const std::vector<double>& dn_grid, double tol) {
  if (set.entries.size() < 2) throw ArgumentError("dominance_map: need at least 2 laws");
  {
    std::set<std::string> labels;
    bool ref_seen = false;
    for (const auto& [label, law] : set.entries) {
      if (!labels.insert(label).second)
        throw ArgumentError("dominance_map: duplicate label \"" + label + "\"");
      ref_seen |= label == set.reference_label;
    }
    if (!ref_seen)
      throw ArgumentError("dominance_map: reference label \"" + set.reference_label +
                          "\" is not in the set");
  }
  auto check_grid = [](const std::vector<double>& g, const char* name) {
    if (g.size() < 1) throw ArgumentError(std::string("dominance_map: empty ") + name);
    for (size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] > 0)) throw ArgumentError(std::string("dominance_map: ") + name +
                                           " must be positive");
      if (i > 0 && !(g[i] > g[i - 1]))
        throw ArgumentError(std::string("dominance_map: ") + name +
                            " must be strictly increasing");
    }
  };
  check_grid(n_grid, "n grid");
  check_grid(dn_grid, "dn grid");
  if (!(tol > 0)) throw ArgumentError("dominance_map: tol must be positive");

  DominanceReport report;
  report.n_grid = n_grid;
  report.dn_grid = dn_grid;
  report.winner.reserve(n_grid.size() * dn_grid.size());

  for (double n : n_grid) {
    for (double r : dn_grid) {
      double best = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      std::string best_label;
      for (const auto& [label, law] : set.entries) {
        const double loss = eval(law, n, r * n);
        if (loss < best) {
          second = best;
          best = loss;
          best_label = label;
        } else if (loss < second) {
          second = loss;
        }
      }
      report.winner.push_back(second - best < tol ? "tie" : best_label);
    }
  }

  const DnRange range{dn_grid.front(), dn_grid.back()};
  for (double n : n_grid) {
    for (size_t i = 0; i < set.entries.size(); ++i) {
      for (size_t j = i + 1; j < set.entries.size(); ++j) {
        const CrossoverScan scan = crossover_dn(set.entries[i].second, set.entries[j].second,
                                                n, range, tol);
        for (double r : scan.roots)
          report.crossovers.push_back({n, r, set.entries[i].first, set.entries[j].first});
      }
    }
  }
  return report;
}

}  // namespace scalekit
