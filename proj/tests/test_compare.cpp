#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "scalekit/compare.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/grid.hpp"
#include "scalekit/laws.hpp"

using namespace scalekit;

namespace {

// pair of laws whose gap -dE + dB * D^-b has one analytic root
struct RootPair {
  LawHandle a;
  LawHandle b;
  double delta_b;
  double delta_e;
  double exp_b;

  double root_d() const { return std::pow(delta_b / delta_e, 1.0 / exp_b); }
};

RootPair make_root_pair() {
  ChinchillaLaw base = fixtures::chinchilla_code();
  ChinchillaLaw cheaper = base;
  cheaper.coef_b = base.coef_b / 2;
  const double delta_b = base.coef_b - cheaper.coef_b;
  // place the boundary at D = 40 * 31.6e6
  const double boundary_d = 40.0 * 31.6e6;
  const double delta_e = delta_b * std::pow(boundary_d, -base.exp_b);
  cheaper.e_irr = base.e_irr + delta_e;
  return {LawHandle{base, ""}, LawHandle{cheaper, ""}, delta_b, delta_e, base.exp_b};
}

}  // namespace

TEST_CASE("identical surfaces are reported as identical") {
  const auto law = fixtures::chinchilla_handle();
  const CrossoverScan scan = crossover_dn(law, law, 1e9, {1.0, 1e4}, 1e-9);
  CHECK(scan.identical);
  CHECK(scan.roots.empty());
  CHECK(scan.touches.empty());
}

TEST_CASE("a constant offset yields no crossover") {
  ChinchillaLaw shifted = fixtures::chinchilla_code();
  shifted.e_irr += 0.01;
  const CrossoverScan scan = crossover_dn(fixtures::chinchilla_handle(),
                                          LawHandle{shifted, ""}, 1e9, {1.0, 1e4}, 1e-9);
  CHECK_FALSE(scan.identical);
  CHECK(scan.roots.empty());
  CHECK(scan.touches.empty());
}

TEST_CASE("single crossover matches the analytic root") {
  const RootPair pair = make_root_pair();
  const double n = 31.6e6;
  const double expected_dn = pair.root_d() / n;
  const CrossoverScan scan = crossover_dn(pair.a, pair.b, n, {1.0, 1e4}, 1e-9);
  REQUIRE(scan.roots.size() == 1);
  CHECK(std::abs(scan.roots[0] - expected_dn) / expected_dn < 1e-6);
  CHECK(expected_dn == doctest::Approx(40.0).epsilon(1e-9));

  // the gap at the refined root is numerically negligible
  const double la = eval(pair.a, n, scan.roots[0] * n);
  const double lb = eval(pair.b, n, scan.roots[0] * n);
  CHECK(std::abs(la - lb) < 1e-9 * (std::abs(la) + std::abs(lb)));
}

TEST_CASE("crossovers are symmetric in argument order") {
  const RootPair pair = make_root_pair();
  const auto fwd = crossover_dn(pair.a, pair.b, 31.6e6, {1.0, 1e4}, 1e-9);
  const auto rev = crossover_dn(pair.b, pair.a, 31.6e6, {1.0, 1e4}, 1e-9);
  REQUIRE(fwd.roots.size() == rev.roots.size());
  for (size_t i = 0; i < fwd.roots.size(); ++i)
    CHECK(std::abs(fwd.roots[i] - rev.roots[i]) / fwd.roots[i] < 1e-9);
}

TEST_CASE("refining the grid never loses roots") {
  const RootPair pair = make_root_pair();
  const auto coarse = crossover_dn(pair.a, pair.b, 31.6e6, {1.0, 1e4}, 1e-9, 512);
  const auto fine = crossover_dn(pair.a, pair.b, 31.6e6, {1.0, 1e4}, 1e-9, 4096);
  REQUIRE(coarse.roots.size() == fine.roots.size());
  for (size_t i = 0; i < coarse.roots.size(); ++i)
    CHECK(std::abs(coarse.roots[i] - fine.roots[i]) / fine.roots[i] < 1e-8);
}

TEST_CASE("cross-family crossovers agree with a dense scan") {
  const auto chin = fixtures::chinchilla_handle();
  const auto far = fixtures::farseer_handle();
  const double n = 1e9;
  const DnRange range{1.2, 100.0};
  const CrossoverScan scan = crossover_dn(chin, far, n, range, 1e-9);

  // dense scan with linear interpolation as an independent locator
  const auto grid = log_spaced(range.lo, range.hi, 200000);
  std::vector<double> located;
  auto gap = [&](double dn) { return eval(chin, n, dn * n) - eval(far, n, dn * n); };
  double prev = gap(grid[0]);
  for (size_t i = 1; i < grid.size(); ++i) {
    const double cur = gap(grid[i]);
    if ((prev < 0 && cur > 0) || (prev > 0 && cur < 0))
      located.push_back(grid[i - 1] + (grid[i] - grid[i - 1]) * (-prev) / (cur - prev));
    prev = cur;
  }
  REQUIRE(located.size() == 2);
  REQUIRE(scan.roots.size() == 2);
  for (size_t i = 0; i < 2; ++i)
    CHECK(std::abs(scan.roots[i] - located[i]) / located[i] < 1e-6);
}

TEST_CASE("tangential contact is reported as a touch") {
  // gap(D) = 1e-4 + D^-0.4 - 0.02 * D^-0.2 has a double root at D = 1e10
  const LawHandle law_a{ChinchillaLaw{0.3 + 1e-4, 1e-12, 0.5, 1.0, 0.4}, ""};
  const LawHandle law_b{ChinchillaLaw{0.3, 1e-12, 0.5, 0.02, 0.2}, ""};
  const double n = 1e6;
  const CrossoverScan scan = crossover_dn(law_a, law_b, n, {1e2, 1e6}, 1e-6);
  CHECK(scan.roots.empty());
  CHECK_FALSE(scan.identical);
  REQUIRE(scan.touches.size() == 1);
  CHECK(scan.touches[0] == doctest::Approx(1e10 / n).epsilon(0.05));
}

TEST_CASE("crossover scan validates inputs") {
  const auto law = fixtures::chinchilla_handle();
  CHECK_THROWS_AS(crossover_dn(law, law, 1e9, {10.0, 10.0}, 1e-9), ArgumentError);
  CHECK_THROWS_AS(crossover_dn(law, law, 1e9, {-1.0, 10.0}, 1e-9), ArgumentError);
  CHECK_THROWS_AS(crossover_dn(law, law, 0.0, {1.0, 10.0}, 1e-9), ArgumentError);
  CHECK_THROWS_AS(crossover_dn(law, law, 1e9, {1.0, 10.0}, 0.0), ArgumentError);
  CHECK_THROWS_AS(crossover_dn(law, law, 1e9, {1.0, 10.0}, 1e-9, 2), ArgumentError);
}

TEST_CASE("identical law sets tie everywhere") {
  const auto law = fixtures::chinchilla_handle();
  LawSet set;
  set.entries = {{"alpha", law}, {"beta", law}, {"gamma", law}};
  set.reference_label = "alpha";
  const auto n_grid = log_spaced(1e7, 1e9, 4);
  const auto dn_grid = log_spaced(5.0, 500.0, 4);
  const DominanceReport report = dominance_map(set, n_grid, dn_grid, 1e-9);
  REQUIRE(report.winner.size() == 16);
  for (const auto& cell : report.winner) CHECK(cell == "tie");
  CHECK(report.crossovers.empty());
}

TEST_CASE("strictly ordered laws have a constant winner") {
  ChinchillaLaw base = fixtures::chinchilla_code();
  ChinchillaLaw worse = base;
  worse.e_irr += 0.05;
  ChinchillaLaw worst = base;
  worst.e_irr += 0.10;
  LawSet set;
  set.entries = {{"base", LawHandle{base, ""}},
                 {"worse", LawHandle{worse, ""}},
                 {"worst", LawHandle{worst, ""}}};
  set.reference_label = "base";
  const auto n_grid = log_spaced(1e7, 1e9, 5);
  const auto dn_grid = log_spaced(5.0, 500.0, 5);
  const DominanceReport report = dominance_map(set, n_grid, dn_grid, 1e-6);
  for (const auto& cell : report.winner) CHECK(cell == "base");
  CHECK(report.crossovers.empty());
}

TEST_CASE("dominance boundary follows the analytic crossover") {
  const RootPair pair = make_root_pair();
  LawSet set;
  set.entries = {{"published", pair.a}, {"cheap", pair.b}};
  set.reference_label = "published";
  const auto n_grid = log_spaced(1e7, 1e9, 6);
  const auto dn_grid = log_spaced(5.0, 500.0, 12);
  const DominanceReport report = dominance_map(set, n_grid, dn_grid, 1e-9);

  const double boundary_d = pair.root_d();
  for (size_t i = 0; i < n_grid.size(); ++i) {
    for (size_t j = 0; j < dn_grid.size(); ++j) {
      const double d = dn_grid[j] * n_grid[i];
      if (std::abs(d - boundary_d) / boundary_d < 0.05) continue;
      const std::string& cell = report.winner[i * dn_grid.size() + j];
      // below the boundary the reduced-coefficient law wins
      CHECK(cell == (d < boundary_d ? "cheap" : "published"));
    }
    // one crossover per row when the boundary ratio falls inside the range
    const double expected_dn = boundary_d / n_grid[i];
    int hits = 0;
    for (const auto& cx : report.crossovers) {
      if (cx.n != n_grid[i]) continue;
      ++hits;
      CHECK(std::abs(cx.dn - expected_dn) / expected_dn < 1e-6);
    }
    CHECK(hits == (expected_dn > 5.0 && expected_dn < 500.0 ? 1 : 0));
  }
}

TEST_CASE("dominance map validates inputs") {
  const auto law = fixtures::chinchilla_handle();
  LawSet one;
  one.entries = {{"only", law}};
  one.reference_label = "only";
  const std::vector<double> ng{1e7, 1e8};
  const std::vector<double> rg{10.0, 100.0};
  CHECK_THROWS_AS(dominance_map(one, ng, rg, 1e-9), ArgumentError);

  LawSet dup;
  dup.entries = {{"x", law}, {"x", law}};
  dup.reference_label = "x";
  CHECK_THROWS_AS(dominance_map(dup, ng, rg, 1e-9), ArgumentError);

  LawSet noref;
  noref.entries = {{"x", law}, {"y", law}};
  noref.reference_label = "z";
  CHECK_THROWS_AS(dominance_map(noref, ng, rg, 1e-9), ArgumentError);

  LawSet ok;
  ok.entries = {{"x", law}, {"y", law}};
  ok.reference_label = "x";
  CHECK_THROWS_AS(dominance_map(ok, {1e8, 1e7}, rg, 1e-9), ArgumentError);
  CHECK_THROWS_AS(dominance_map(ok, ng, {100.0, 10.0}, 1e-9), ArgumentError);
  CHECK_THROWS_AS(dominance_map(ok, ng, rg, 0.0), ArgumentError);
}
