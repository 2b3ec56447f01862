#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scalekit/laws.hpp"

namespace scalekit {

struct LawSet {
  std::vector<std::pair<std::string, LawHandle>> entries;  // labels unique
  std::string reference_label;
};

struct CrossoverScan {
  std::vector<double> roots;    // ascending D/N values with a sign change
  std::vector<double> touches;  // |f| dips below tol without changing sign
  bool identical = false;       // surfaces agree within tol on the whole grid
};

struct DnRange {
  double lo = 0;
  double hi = 0;
};

// Sign changes of f(r) = L_a(n, r*n) - L_b(n, r*n) on a log grid,
// refined by bisection to relative 1e-9.
CrossoverScan crossover_dn(const LawHandle& law_a, const LawHandle& law_b, double n,
                           const DnRange& dn_range, double tol, int grid_points = 512);

struct Crossover {
  double n = 0;
  double dn = 0;
  std::string label_a;
  std::string label_b;
};

struct DominanceReport {
  std::vector<double> n_grid;
  std::vector<double> dn_grid;
  std::vector<std::string> winner;  // row-major n x dn; "tie" when too close
  std::vector<Crossover> crossovers;
};

DominanceReport dominance_map(const LawSet& set, const std::vector<double>& n_grid,
                              const std::vector<double>& dn_grid, double tol);

}  // namespace scalekit
