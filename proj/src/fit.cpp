#include "scalekit/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "golden.hpp"
#include "scalekit/nelder_mead.hpp"

namespace scalekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// mt19937_64 draws mapped by hand so streams are identical across
// standard libraries.
double uniform01(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

double log_uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::exp(uniform(gen, std::log(lo), std::log(hi)));
}

struct FitData {
  Eigen::ArrayXd n, d, loss, ln_n, ln_d, ln_loss;
};

FitData dedup(const std::vector<RunRecord>& sorted) {
  std::vector<double> n, d, loss;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    double sum_ln = 0;
    while (j < sorted.size() && sorted[j].n_params == sorted[i].n_params &&
           sorted[j].d_tokens == sorted[i].d_tokens) {
      sum_ln += std::log(sorted[j].loss);
      ++j;
    }
    n.push_back(sorted[i].n_params);
    d.push_back(sorted[i].d_tokens);
    loss.push_back(std::exp(sum_ln / static_cast<double>(j - i)));
    i = j;
  }
  FitData out;
  const auto m = static_cast<Eigen::Index>(n.size());
  out.n = Eigen::Map<Eigen::ArrayXd>(n.data(), m);
  out.d = Eigen::Map<Eigen::ArrayXd>(d.data(), m);
  out.loss = Eigen::Map<Eigen::ArrayXd>(loss.data(), m);
  out.ln_n = out.n.log();
  out.ln_d = out.d.log();
  out.ln_loss = out.loss.log();
  return out;
}

// Internal coordinates: chinchilla (ln E, ln A, a, ln B, b), farseer raw.
ChinchillaLaw unpack_chinchilla(const Eigen::VectorXd& t) {
  return {std::exp(t[0]), std::exp(t[1]), t[2], std::exp(t[3]), t[4]};
}

FarseerLaw unpack_farseer(const Eigen::VectorXd& t) {
  return {t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7], t[8]};
}

double predict_chinchilla(const Eigen::VectorXd& t, double ln_n, double ln_d) {
  return std::exp(t[0]) + std::exp(t[1] - t[2] * ln_n) + std::exp(t[3] - t[4] * ln_d);
}

double predict_farseer(const Eigen::VectorXd& t, double ln_n, double ln_d) {
  const double term1 = std::exp(t[0] * std::exp(t[1] * ln_n) + t[2]);
  const double e = std::exp(t[6] * std::exp(t[7] * ln_n) + t[8]);
  const double term2 = std::exp(t[3] * std::exp(t[4] * ln_n) + t[5] - e * ln_d);
  return term1 + term2;
}

double huber(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

struct Objective {
  const FitData& data;
  LawFamily family;
  FitObjective kind;
  double delta;

  double operator()(const Eigen::VectorXd& t) const {
    double acc = 0;
    const auto m = data.n.size();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double pred = family == LawFamily::chinchilla
                              ? predict_chinchilla(t, data.ln_n[i], data.ln_d[i])
                              : predict_farseer(t, data.ln_n[i], data.ln_d[i]);
      if (!std::isfinite(pred) || pred <= 0) return kInf;
      if (kind == FitObjective::huber_log)
        acc += huber(std::log(pred) - data.ln_loss[i], delta);
      else
        acc += 1000.0 * std::abs(pred - data.loss[i]) / data.loss[i];
    }
    return acc / static_cast<double>(m);
  }
};

// Grid over the exponent pair with the linear coefficients solved exactly;
// a classic variable-projection warm start.
Eigen::VectorXd staged_chinchilla_start(const FitData& data, const std::vector<Interval>& b) {
  const auto m = data.n.size();
  double best_sse = kInf;
  double best_a = 0.5, best_b = 0.5;
  Eigen::Vector3d best_eab(0.5, 1.0, 1.0);
  const double a_lo = std::max(0.05, b[2].lo), a_hi = std::min(1.0, b[2].hi);
  const double b_lo = std::max(0.05, b[4].lo), b_hi = std::min(1.0, b[4].hi);
  for (int ia = 0; ia < 24; ++ia) {
    const double ea = a_lo + (a_hi - a_lo) * ia / 23.0;
    for (int ib = 0; ib < 24; ++ib) {
      const double eb = b_lo + (b_hi - b_lo) * ib / 23.0;
      Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
      Eigen::Vector3d aty = Eigen::Vector3d::Zero();
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Vector3d row(1.0, std::exp(-ea * data.ln_n[i]),
                                  std::exp(-eb * data.ln_d[i]));
        ata += row * row.transpose();
        aty += row * data.loss[i];
      }
      const Eigen::Vector3d sol = ata.ldlt().solve(aty);
      double sse = 0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double pred = sol[0] + sol[1] * std::exp(-ea * data.ln_n[i]) +
                            sol[2] * std::exp(-eb * data.ln_d[i]);
        sse += (pred - data.loss[i]) * (pred - data.loss[i]);
      }
      if (sse < best_sse) {
        best_sse = sse;
        best_a = ea;
        best_b = eb;
        best_eab = sol;
      }
    }
  }
  Eigen::VectorXd t(5);
  t[0] = std::log(std::clamp(best_eab[0], std::max(b[0].lo, 1e-12), b[0].hi));
  t[1] = std::log(std::clamp(best_eab[1], std::max(b[1].lo, 1e-12), b[1].hi));
  t[2] = best_a;
  t[3] = std::log(std::clamp(best_eab[2], std::max(b[3].lo, 1e-12), b[3].hi));
  t[4] = best_b;
  return t;
}

// Semi-linear fit y ~ c * x^p + k: p on a grid plus golden refinement,
// (c, k) solved by least squares at each p.
struct PowerFit {
  double c = 0, p = 0, k = 0;
};

PowerFit fit_power_offset(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double p_lo,
                          double p_hi) {
  const Eigen::ArrayXd ln_x = x.log();
  auto solve_at = [&](double p, PowerFit* out) {
    Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
    Eigen::Vector2d aty = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const Eigen::Vector2d row(std::exp(p * ln_x[i]), 1.0);
      ata += row * row.transpose();
      aty += row * y[i];
    }
    const Eigen::Vector2d sol = ata.ldlt().solve(aty);
    double sse = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double pred = sol[0] * std::exp(p * ln_x[i]) + sol[1];
      sse += (pred - y[i]) * (pred - y[i]);
    }
    if (out) *out = {sol[0], p, sol[1]};
    return sse;
  };
  double best_p = p_lo, best_sse = kInf;
  for (int i = 0; i < 80; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / 79.0;
    const double sse = solve_at(p, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best_p = p;
    }
  }
  const double step = (p_hi - p_lo) / 79.0;
  const double p_ref = detail::golden_min([&](double p) { return solve_at(p, nullptr); },
                                          std::max(p_lo, best_p - step),
                                          std::min(p_hi, best_p + step), 1e-12);
  PowerFit out;
  solve_at(p_ref, &out);
  return out;
}

// Per-n separable fits L = f + g * d^(-h), then power-law fits of
// ln f, ln g, ln h against n.
std::optional<Eigen::VectorXd> staged_farseer_start(const FitData& data,
                                                    const std::vector<Interval>& b) {
  struct Group {
    double n;
    std::vector<double> ln_d, loss;
  };
  std::vector<Group> groups;
  for (Eigen::Index i = 0; i < data.n.size(); ++i) {
    if (groups.empty() || groups.back().n != data.n[i]) groups.push_back({data.n[i], {}, {}});
    groups.back().ln_d.push_back(data.ln_d[i]);
    groups.back().loss.push_back(data.loss[i]);
  }
  std::vector<double> ns, fs, gs, hs;
  for (const auto& g : groups) {
    if (g.ln_d.size() < 3) continue;
    auto sse_at = [&](double h, double* f_out, double* g_out) {
      Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
      Eigen::Vector2d aty = Eigen::Vector2d::Zero();
      for (size_t i = 0; i < g.ln_d.size(); ++i) {
        const Eigen::Vector2d row(1.0, std::exp(-h * g.ln_d[i]));
        ata += row * row.transpose();
        aty += row * g.loss[i];
      }
      const Eigen::Vector2d sol = ata.ldlt().solve(aty);
      double sse = 0;
      for (size_t i = 0; i < g.ln_d.size(); ++i) {
        const double pred = sol[0] + sol[1] * std::exp(-h * g.ln_d[i]);
        sse += (pred - g.loss[i]) * (pred - g.loss[i]);
      }
      if (f_out) *f_out = sol[0];
      if (g_out) *g_out = sol[1];
      return sse;
    };
    double best_h = 0.1, best_sse = kInf;
    for (int i = 0; i < 60; ++i) {
      const double h = std::exp(std::log(0.01) + (std::log(1.5) - std::log(0.01)) * i / 59.0);
      const double sse = sse_at(h, nullptr, nullptr);
      if (sse < best_sse) {
        best_sse = sse;
        best_h = h;
      }
    }
    const double h = detail::golden_min(
        [&](double hh) { return sse_at(hh, nullptr, nullptr); }, best_h * 0.8, best_h * 1.25,
        1e-12);
    double f = 0, gg = 0;
    sse_at(h, &f, &gg);
    if (!(f > 0) || !(gg > 0) || !(h > 0)) continue;
    ns.push_back(g.n);
    fs.push_back(std::log(f));
    gs.push_back(std::log(gg));
    hs.push_back(std::log(h));
  }
  if (ns.size() < 3) return std::nullopt;

  const auto m = static_cast<Eigen::Index>(ns.size());
  const Eigen::ArrayXd nn = Eigen::Map<Eigen::ArrayXd>(ns.data(), m);
  const Eigen::ArrayXd vf = Eigen::Map<Eigen::ArrayXd>(fs.data(), m);
  const Eigen::ArrayXd vg = Eigen::Map<Eigen::ArrayXd>(gs.data(), m);
  const Eigen::ArrayXd vh = Eigen::Map<Eigen::ArrayXd>(hs.data(), m);

  const PowerFit pf = fit_power_offset(nn, vf, 0.01, 0.8);    // ln f = s n^q + S
  const PowerFit pg = fit_power_offset(nn, vg, -0.8, -0.005); // ln g = B n^b + Q
  const PowerFit ph = fit_power_offset(nn, vh, 0.01, 0.8);    // ln h = A n^a + E

  Eigen::VectorXd t(9);
  t << pf.c, pf.p, pf.k, pg.c, pg.p, pg.k, ph.c, ph.p, ph.k;
  for (int i = 0; i < 9; ++i)
    t[i] = std::clamp(t[i], b[static_cast<size_t>(i)].lo, b[static_cast<size_t>(i)].hi);
  return t;
}

Eigen::VectorXd random_chinchilla_start(std::mt19937_64& gen) {
  Eigen::VectorXd t(5);
  t[0] = std::log(log_uniform(gen, 1e-3, 1.0));
  t[1] = std::log(log_uniform(gen, 1.0, 1e4));
  t[2] = uniform(gen, 0.05, 1.0);
  t[3] = std::log(log_uniform(gen, 1.0, 1e4));
  t[4] = uniform(gen, 0.05, 1.0);
  return t;
}

// Sign pattern anchored on the published fit: t1_s < 0, t2_B > 0,
// t2_b < 0, ex_A < 0.
Eigen::VectorXd random_farseer_start(std::mt19937_64& gen) {
  Eigen::VectorXd t(9);
  t[0] = -log_uniform(gen, 1e-4, 0.5);
  t[1] = uniform(gen, 0.05, 0.5);
  t[2] = uniform(gen, -3.0, 1.0);
  t[3] = log_uniform(gen, 1.0, 200.0);
  t[4] = -uniform(gen, 0.01, 0.3);
  t[5] = uniform(gen, -20.0, 0.0);
  t[6] = -log_uniform(gen, 1e-3, 0.5);
  t[7] = uniform(gen, 0.05, 0.5);
  t[8] = uniform(gen, -2.0, 1.0);
  return t;
}

std::string config_digest(const FitConfig& config, bool default_bounds_used) {
  std::ostringstream os;
  os << "obj=" << (config.objective == FitObjective::huber_log ? "huber_log" : "mre")
     << ",delta=" << config.huber_delta << ",starts=" << config.n_starts
     << ",iters=" << config.max_iters << ",seed=" << config.seed
     << ",bounds=" << (default_bounds_used ? "default" : "custom");
  return os.str();
}

}  // namespace

std::vector<Interval> default_bounds(LawFamily family) {
  if (family == LawFamily::chinchilla)
    return {{1e-6, 10.0}, {1e-3, 1e6}, {0.01, 2.0}, {1e-3, 1e6}, {0.01, 2.0}};
  return {{-200.0, 200.0}, {-1.0, 1.0}, {-30.0, 30.0},
          {-200.0, 200.0}, {-1.0, 1.0}, {-30.0, 30.0},
          {-200.0, 200.0}, {-1.0, 1.0}, {-30.0, 30.0}};
}

double relative_error(double predicted, double actual) {
  if (!(actual > 0)) throw ArgumentError("relative_error: actual must be positive");
  return 1000.0 * std::abs(predicted - actual) / actual;
}

FitReport fit(const std::vector<RunRecord>& records, const FitConfig& config) {
  const size_t min_records = config.family == LawFamily::chinchilla ? 6 : 12;
  if (records.size() < min_records)
    throw ArgumentError("fit: need at least " + std::to_string(min_records) + " records for " +
                        family_name(config.family) + ", got " + std::to_string(records.size()));
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!(r.n_params >= 1) || !(r.d_tokens >= 1) || !(r.loss > 0) ||
        !std::isfinite(r.n_params) || !std::isfinite(r.d_tokens) || !std::isfinite(r.loss))
      throw ArgumentError("fit: record " + std::to_string(i) +
                          " violates n >= 1, d >= 1, loss > 0");
  }
  if (config.n_starts < 1) throw ArgumentError("fit: n_starts must be >= 1");
  if (!(config.huber_delta > 0)) throw ArgumentError("fit: huber_delta must be positive");

  std::vector<RunRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.n_params != b.n_params) return a.n_params < b.n_params;
    if (a.d_tokens != b.d_tokens) return a.d_tokens < b.d_tokens;
    return a.loss < b.loss;
  });
  {
    bool two_n = false, two_d = false;
    for (size_t i = 1; i < sorted.size(); ++i) {
      two_n |= sorted[i].n_params != sorted[0].n_params;
      two_d |= sorted[i].d_tokens != sorted[0].d_tokens;
    }
    if (!two_n || !two_d)
      throw ArgumentError("fit: records must span at least 2 distinct n and 2 distinct d");
  }

  const bool default_bounds_used = config.bounds.empty();
  const std::vector<Interval> bounds =
      default_bounds_used ? default_bounds(config.family) : config.bounds;
  const size_t want = config.family == LawFamily::chinchilla ? 5 : 9;
  if (bounds.size() != want)
    throw ArgumentError("fit: expected " + std::to_string(want) + " coefficient bounds");
  for (const auto& iv : bounds)
    if (!(iv.lo <= iv.hi)) throw ArgumentError("fit: bounds must satisfy lo <= hi");

  const FitData data = dedup(sorted);
  const Objective objective{data, config.family, config.objective, config.huber_delta};

  const auto dim = static_cast<Eigen::Index>(want);
  Eigen::VectorXd lo(dim), hi(dim);
  if (config.family == LawFamily::chinchilla) {
    // E, A, B live in log space; exponents stay raw
    for (int i : {0, 1, 3}) {
      lo[i] = std::log(std::max(bounds[static_cast<size_t>(i)].lo, 1e-300));
      hi[i] = std::log(std::max(bounds[static_cast<size_t>(i)].hi, 1e-299));
    }
    for (int i : {2, 4}) {
      lo[i] = bounds[static_cast<size_t>(i)].lo;
      hi[i] = bounds[static_cast<size_t>(i)].hi;
    }
  } else {
    for (Eigen::Index i = 0; i < dim; ++i) {
      lo[i] = bounds[static_cast<size_t>(i)].lo;
      hi[i] = bounds[static_cast<size_t>(i)].hi;
    }
  }

  std::vector<Eigen::VectorXd> starts;
  starts.reserve(static_cast<size_t>(config.n_starts));
  if (config.family == LawFamily::chinchilla) {
    starts.push_back(staged_chinchilla_start(data, bounds));
  } else if (auto staged = staged_farseer_start(data, bounds)) {
    starts.push_back(*staged);
  } else {
    std::mt19937_64 g0(config.seed ^ 0x9e3779b97f4a7c15ull);
    starts.push_back(random_farseer_start(g0));
  }
  std::mt19937_64 gen(config.seed);
  while (starts.size() < static_cast<size_t>(config.n_starts))
    starts.push_back(config.family == LawFamily::chinchilla ? random_chinchilla_start(gen)
                                                            : random_farseer_start(gen));

  NelderMeadOptions nm_opts;
  nm_opts.max_iters = config.max_iters;

  double best_value = kInf;
  int best_index = -1;
  int converged_count = 0;
  Eigen::VectorXd best_theta;
  for (size_t s = 0; s < starts.size(); ++s) {
    const NelderMeadResult r = nelder_mead(objective, starts[s], lo, hi, nm_opts);
    if (r.converged) ++converged_count;
    if (r.value < best_value) {
      best_value = r.value;
      best_index = static_cast<int>(s);
      best_theta = r.x;
    }
  }
  if (best_index < 0 || !std::isfinite(best_value)) {
    FitReport empty;
    throw FitError("fit: every start produced a non-finite objective", empty);
  }

  // polish the winner: the simplex stalls long before the basin floor on
  // the 9-parameter surface, so restart it around the incumbent at
  // progressively finer scales
  for (int round = 0; round < 8; ++round) {
    NelderMeadOptions polish = nm_opts;
    polish.init_scale = nm_opts.init_scale * std::pow(0.1, round);
    const NelderMeadResult r = nelder_mead(objective, best_theta, lo, hi, polish);
    if (r.value < best_value) {
      best_value = r.value;
      best_theta = r.x;
    }
  }

  LawHandle law;
  if (config.family == LawFamily::chinchilla)
    law.params = unpack_chinchilla(best_theta);
  else
    law.params = unpack_farseer(best_theta);
  law.provenance = "fit(" + family_name(config.family) + ", " +
                   config_digest(config, default_bounds_used) + ")";

  FitReport report;
  report.law = law;
  report.objective_value = best_value;
  report.starts_converged = converged_count;
  report.best_start_index = best_index;
  report.residuals.reserve(sorted.size());
  double acc = 0;
  for (const auto& r : sorted) {
    const double pred = eval(law, r.n_params, r.d_tokens);
    const double re = relative_error(pred, r.loss);
    report.residuals.push_back({pred, r.loss, re});
    acc += re;
  }
  report.mre_permille = acc / static_cast<double>(sorted.size());

  if (converged_count == 0)
    throw FitError("fit: no start converged within " + std::to_string(config.max_iters) +
                       " iterations",
                   report);
  return report;
}

FitReport score(const LawHandle& law, const std::vector<RunRecord>& records) {
  if (records.empty()) throw ArgumentError("score: records must be non-empty");
  FitReport report;
  report.law = law;
  report.residuals.reserve(records.size());
  double acc = 0;
  for (const auto& r : records) {
    if (!(r.loss > 0)) throw ArgumentError("score: record loss must be positive");
    const double pred = eval(law, r.n_params, r.d_tokens);
    const double re = relative_error(pred, r.loss);
    report.residuals.push_back({pred, r.loss, re});
    acc += re;
  }
  report.mre_permille = acc / static_cast<double>(records.size());
  report.objective_value = report.mre_permille;
  return report;
}

}  // namespace scalekit
