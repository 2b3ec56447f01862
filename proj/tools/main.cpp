#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scalekit/compare.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/fit.hpp"
#include "scalekit/grid.hpp"
#include "scalekit/io.hpp"
#include "scalekit/laws.hpp"
#include "scalekit/planner.hpp"
#include "scalekit/sweep.hpp"

namespace {

using namespace scalekit;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string basename_of(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string label_of(const std::string& path) {
  std::string base = basename_of(path);
  const size_t dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

SeriesFormat parse_format(const std::string& name) {
  return name == "json" ? SeriesFormat::json : SeriesFormat::csv;
}

void put_series(const Series& series, const std::string& out, const std::string& format) {
  if (out.empty())
    std::fputs(format_series(series, parse_format(format)).c_str(), stdout);
  else
    emit_series(series, parse_format(format), out);
}

struct FitArgs {
  std::string law, input, out;
  std::string objective = "huber_log";
  std::uint64_t seed = 0;
  int starts = 64;
  int max_iters = 2000;
  double huber_delta = 1e-3;
};

void run_fit(const FitArgs& args) {
  IngestMeta meta;
  const auto records = ingest(args.input, &meta);
  FitConfig config;
  config.family = family_from_name(args.law);
  config.objective = args.objective == "huber_log" ? FitObjective::huber_log
                                                   : FitObjective::mean_relative_error;
  config.huber_delta = args.huber_delta;
  config.n_starts = args.starts;
  config.max_iters = args.max_iters;
  config.seed = args.seed;
  const FitReport report = fit(records, config);

  LawFile file;
  file.law = report.law;
  file.provenance.source = "fit of " + basename_of(args.input) +
                           (meta.billions ? " (units: billions)" : "");
  file.provenance.fit_config_digest = report.law.provenance;
  file.provenance.record_count = static_cast<std::int64_t>(records.size());
  file.provenance.mre_permille = report.mre_permille;
  write_lawfile(args.out, file);
  std::printf("mre_permille %s\n", num(report.mre_permille).c_str());
}

void run_score(const std::string& params, const std::string& input) {
  const LawHandle law = read_lawfile(params).law;
  const auto records = ingest(input);
  const FitReport report = score(law, records);
  std::printf("n_params,d_tokens,loss,predicted,re_permille\n");
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto& res = report.residuals[i];
    std::printf("%s,%s,%s,%s,%s\n", num(rec.n_params).c_str(), num(rec.d_tokens).c_str(),
                num(res.actual).c_str(), num(res.predicted).c_str(),
                num(res.re_permille).c_str());
  }
  std::printf("# mre_permille %s\n", num(report.mre_permille).c_str());
}

struct OptimalArgs {
  std::string params;
  double compute = 0;
  double multiplier = 6;
  std::string basis = "non_embedding";
  double bracket_lo = 1e7;
  double bracket_hi = 1e12;
  bool numeric = false;
};

void run_optimal(const OptimalArgs& args) {
  const LawHandle law = read_lawfile(args.params).law;
  FlopConvention conv;
  conv.multiplier = args.multiplier;
  conv.param_basis = args.basis == "with_embedding" ? ParamBasis::with_embedding
                                                    : ParamBasis::non_embedding;
  const Bracket bracket{args.bracket_lo, args.bracket_hi};
  const Allocation alloc =
      law.family() == LawFamily::chinchilla && !args.numeric
          ? chinchilla_optimal(law.chinchilla(), args.compute, conv)
          : numeric_optimal(law, args.compute, conv, bracket);
  std::printf("compute %s\n", num(alloc.compute).c_str());
  std::printf("method %s\n",
              alloc.method == AllocationMethod::closed_form ? "closed_form" : "numeric");
  std::printf("n_opt %s\n", num(alloc.n_opt).c_str());
  std::printf("d_opt %s\n", num(alloc.d_opt).c_str());
  std::printf("dn_ratio %s\n", num(alloc.dn_ratio).c_str());
  std::printf("predicted_loss %s\n", num(alloc.predicted_loss).c_str());
  std::printf("boundary %s\n", alloc.boundary ? "true" : "false");
  std::printf("flat_basin %s\n", alloc.flat_basin ? "true" : "false");
}

struct FrontierArgs {
  std::string params;
  double c_min = 0, c_max = 0;
  int points = 0;
  double multiplier = 6;
  double bracket_lo = 1e7, bracket_hi = 1e12;
  std::string out, format = "csv";
};

void run_frontier(const FrontierArgs& args) {
  const LawHandle law = read_lawfile(args.params).law;
  FlopConvention conv;
  conv.multiplier = args.multiplier;
  const auto curve = optimal_dn_curve(law, log_spaced(args.c_min, args.c_max, args.points),
                                      conv, Bracket{args.bracket_lo, args.bracket_hi});
  Series series;
  series.columns = {"compute", "dn_ratio", "n_opt", "d_opt", "loss"};
  for (const auto& pt : curve)
    series.rows.push_back({pt.compute, pt.dn_ratio, pt.n_opt, pt.d_opt, pt.loss});
  put_series(series, args.out, args.format);
}

void run_limit(const std::string& params) {
  const LimitResult limit = asymptotic_limit(read_lawfile(params).law);
  switch (limit.kind) {
    case LimitResult::Kind::finite:
      std::printf("%s\n", num(limit.value).c_str());
      break;
    case LimitResult::Kind::divergent:
      std::printf("divergent\n");
      break;
    case LimitResult::Kind::path_dependent:
      std::printf("path-dependent\n");
      break;
  }
}

struct CompareArgs {
  std::vector<std::string> params;
  double fixed_n = 0;
  double dn_min = 0, dn_max = 0;
  double tol = 1e-9;
  int rows = 25;
};

void run_compare(const CompareArgs& args) {
  LawSet set;
  for (const auto& path : args.params) {
    std::string label = label_of(path);
    for (const auto& [existing, law] : set.entries)
      if (existing == label) label += "_" + std::to_string(set.entries.size() + 1);
    set.entries.emplace_back(label, read_lawfile(path).law);
  }
  set.reference_label = set.entries.front().first;
  const auto dn_grid = log_spaced(args.dn_min, args.dn_max, args.rows);
  const DominanceReport report = dominance_map(set, {args.fixed_n}, dn_grid, args.tol);
  std::printf("# reference %s\n", set.reference_label.c_str());
  for (const auto& cx : report.crossovers)
    std::printf("# crossover %s %s n %s dn %s\n", cx.label_a.c_str(), cx.label_b.c_str(),
                num(cx.n).c_str(), num(cx.dn).c_str());
  std::printf("dn_ratio,winner\n");
  for (size_t j = 0; j < dn_grid.size(); ++j)
    std::printf("%s,%s\n", num(dn_grid[j]).c_str(), report.winner[j].c_str());
}

struct SweepArgs {
  std::vector<double> n_values;
  GridRange n_range{0, 0, 0};
  GridRange d_range{0, 0, 0};
  double dn_min = 0, dn_max = 0;
  std::int64_t target_total = -1;
  std::string out, format = "csv";
};

void run_sweep(const SweepArgs& args) {
  SweepSpec spec;
  spec.n_values = args.n_values;
  spec.n_range = args.n_range;
  spec.d_range = args.d_range;
  spec.dn_min = args.dn_min;
  spec.dn_max = args.dn_max;
  if (args.target_total >= 0) spec.target_total = args.target_total;
  const auto points = plan_sweep(spec);
  Series series;
  series.columns = {"n", "d"};
  for (const auto& pt : points) series.rows.push_back({pt.n, pt.d});
  put_series(series, args.out, args.format);
}

void run_arch(double target_n) {
  const ArchConfig arch = derive_arch(target_n);
  std::printf("d_model %d\n", arch.d_model);
  std::printf("d_ff %d\n", arch.d_ff);
  std::printf("n_head %d\n", arch.n_head);
  std::printf("n_layer %d\n", arch.n_layer);
  std::printf("vocab %d\n", arch.vocab);
  std::printf("n_params %lld\n", static_cast<long long>(arch.n_params));
  std::printf("n_with_emb %lld\n", static_cast<long long>(arch.n_with_emb));
}

void run_gpus(int gbz, int mbz_max, int gpu_step, int max_gpus) {
  const GpuPlan plan = plan_gpus(gbz, mbz_max, gpu_step, max_gpus);
  std::printf("gbz %d\n", plan.gbz);
  std::printf("gpus %d\n", plan.gpus);
  std::printf("mbz %d\n", plan.mbz);
  std::printf("accum %d\n", plan.accum);
}

struct SurfaceArgs {
  std::string params;
  GridRange n_range{0, 0, 0};
  GridRange d_range{0, 0, 0};
  std::string out, format = "csv";
};

void run_surface(const SurfaceArgs& args) {
  const LawHandle law = read_lawfile(args.params).law;
  const auto n_grid = log_spaced(args.n_range.min, args.n_range.max, args.n_range.count);
  const auto d_grid = log_spaced(args.d_range.min, args.d_range.max, args.d_range.count);
  Series series;
  series.columns = {"n", "d", "loss"};
  for (double n : n_grid)
    for (double d : d_grid) series.rows.push_back({n, d, eval(law, n, d)});
  put_series(series, args.out, args.format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scaling-law toolkit for code pretraining"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit a law family to run records");
  fit_cmd->add_option("--law", fit_args.law, "law family")
      ->required()
      ->check(CLI::IsMember({"chinchilla", "farseer"}));
  fit_cmd->add_option("--input", fit_args.input, "run records CSV")->required();
  fit_cmd->add_option("--out", fit_args.out, "output law file")->required();
  fit_cmd->add_option("--objective", fit_args.objective, "fit objective")
      ->check(CLI::IsMember({"huber_log", "mre"}));
  fit_cmd->add_option("--seed", fit_args.seed, "random seed");
  fit_cmd->add_option("--starts", fit_args.starts, "number of starts");
  fit_cmd->add_option("--max-iters", fit_args.max_iters, "iterations per start");
  fit_cmd->add_option("--huber-delta", fit_args.huber_delta, "huber transition point");
  fit_cmd->callback([&] { run_fit(fit_args); });

  std::string predict_params;
  double predict_n = 0, predict_d = 0;
  auto* predict_cmd = app.add_subcommand("predict", "evaluate a law at (n, d)");
  predict_cmd->add_option("--params", predict_params, "law file")->required();
  predict_cmd->add_option("--n", predict_n, "non-embedding parameter count")->required();
  predict_cmd->add_option("--d", predict_d, "token count")->required();
  predict_cmd->callback([&] {
    const LawHandle law = read_lawfile(predict_params).law;
    std::printf("%s\n", num(eval(law, predict_n, predict_d)).c_str());
  });

  std::string score_params, score_input;
  auto* score_cmd = app.add_subcommand("score", "evaluate a law on run records");
  score_cmd->add_option("--params", score_params, "law file")->required();
  score_cmd->add_option("--input", score_input, "run records CSV")->required();
  score_cmd->callback([&] { run_score(score_params, score_input); });

  OptimalArgs optimal_args;
  auto* optimal_cmd = app.add_subcommand("optimal", "compute-optimal allocation");
  optimal_cmd->add_option("--params", optimal_args.params, "law file")->required();
  optimal_cmd->add_option("--compute", optimal_args.compute, "budget in FLOPs")->required();
  optimal_cmd->add_option("--multiplier", optimal_args.multiplier, "FLOPs per param-token");
  optimal_cmd->add_option("--basis", optimal_args.basis, "parameter basis")
      ->check(CLI::IsMember({"non_embedding", "with_embedding"}));
  optimal_cmd->add_option("--bracket-lo", optimal_args.bracket_lo, "search bracket low n");
  optimal_cmd->add_option("--bracket-hi", optimal_args.bracket_hi, "search bracket high n");
  optimal_cmd->add_flag("--numeric", optimal_args.numeric, "force the numeric search");
  optimal_cmd->callback([&] { run_optimal(optimal_args); });

  FrontierArgs frontier_args;
  auto* frontier_cmd = app.add_subcommand("frontier", "optimal D/N versus compute");
  frontier_cmd->add_option("--params", frontier_args.params, "law file")->required();
  frontier_cmd->add_option("--c-min", frontier_args.c_min, "lowest budget")->required();
  frontier_cmd->add_option("--c-max", frontier_args.c_max, "highest budget")->required();
  frontier_cmd->add_option("--points", frontier_args.points, "budget count")->required();
  frontier_cmd->add_option("--multiplier", frontier_args.multiplier, "FLOPs per param-token");
  frontier_cmd->add_option("--bracket-lo", frontier_args.bracket_lo, "search bracket low n");
  frontier_cmd->add_option("--bracket-hi", frontier_args.bracket_hi, "search bracket high n");
  frontier_cmd->add_option("--out", frontier_args.out, "output path (default stdout)");
  frontier_cmd->add_option("--format", frontier_args.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  frontier_cmd->callback([&] { run_frontier(frontier_args); });

  std::string limit_params;
  auto* limit_cmd = app.add_subcommand("limit", "asymptotic loss limit");
  limit_cmd->add_option("--params", limit_params, "law file")->required();
  limit_cmd->callback([&] { run_limit(limit_params); });

  CompareArgs compare_args;
  auto* compare_cmd = app.add_subcommand("compare", "crossovers and dominance at fixed n");
  compare_cmd->add_option("--params", compare_args.params, "two or more law files")
      ->required()
      ->expected(2, -1);
  compare_cmd->add_option("--fixed-n", compare_args.fixed_n, "model size")->required();
  compare_cmd->add_option("--dn-min", compare_args.dn_min, "lowest D/N")->required();
  compare_cmd->add_option("--dn-max", compare_args.dn_max, "highest D/N")->required();
  compare_cmd->add_option("--tol", compare_args.tol, "tie tolerance");
  compare_cmd->add_option("--rows", compare_args.rows, "dominance row count");
  compare_cmd->callback([&] { run_compare(compare_args); });

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "design a training run grid");
  auto* n_values_opt =
      sweep_cmd->add_option("--n-values", sweep_args.n_values, "explicit model sizes")
          ->delimiter(',');
  auto* n_min_opt = sweep_cmd->add_option("--n-min", sweep_args.n_range.min, "lowest n");
  sweep_cmd->add_option("--n-max", sweep_args.n_range.max, "highest n");
  sweep_cmd->add_option("--n-count", sweep_args.n_range.count, "model size count");
  n_values_opt->excludes(n_min_opt);
  sweep_cmd->add_option("--d-min", sweep_args.d_range.min, "lowest d")->required();
  sweep_cmd->add_option("--d-max", sweep_args.d_range.max, "highest d")->required();
  sweep_cmd->add_option("--d-count", sweep_args.d_range.count, "budget count")->required();
  sweep_cmd->add_option("--dn-min", sweep_args.dn_min, "lowest admissible D/N")->required();
  sweep_cmd->add_option("--dn-max", sweep_args.dn_max, "highest admissible D/N")->required();
  sweep_cmd->add_option("--target-total", sweep_args.target_total, "expected point count");
  sweep_cmd->add_option("--out", sweep_args.out, "output path (default stdout)");
  sweep_cmd->add_option("--format", sweep_args.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->callback([&] { run_sweep(sweep_args); });

  double arch_target = 0;
  auto* arch_cmd = app.add_subcommand("arch", "nearest canonical architecture");
  arch_cmd->add_option("--target-n", arch_target, "non-embedding parameter target")
      ->required();
  arch_cmd->callback([&] { run_arch(arch_target); });

  int gpus_gbz = 0, gpus_mbz_max = 0, gpus_step = 8, gpus_max = 0;
  auto* gpus_cmd = app.add_subcommand("gpus", "batch factorization plan");
  gpus_cmd->add_option("--gbz", gpus_gbz, "global batch size")->required();
  gpus_cmd->add_option("--mbz-max", gpus_mbz_max, "micro batch ceiling")->required();
  gpus_cmd->add_option("--gpu-step", gpus_step, "gpu count granularity");
  gpus_cmd->add_option("--max-gpus", gpus_max, "gpu budget, 0 = unbounded");
  gpus_cmd->callback([&] { run_gpus(gpus_gbz, gpus_mbz_max, gpus_step, gpus_max); });

  SurfaceArgs surface_args;
  auto* surface_cmd = app.add_subcommand("surface", "loss over an (n, d) grid");
  surface_cmd->add_option("--params", surface_args.params, "law file")->required();
  surface_cmd->add_option("--n-min", surface_args.n_range.min, "lowest n")->required();
  surface_cmd->add_option("--n-max", surface_args.n_range.max, "highest n")->required();
  surface_cmd->add_option("--n-count", surface_args.n_range.count, "n count")->required();
  surface_cmd->add_option("--d-min", surface_args.d_range.min, "lowest d")->required();
  surface_cmd->add_option("--d-max", surface_args.d_range.max, "highest d")->required();
  surface_cmd->add_option("--d-count", surface_args.d_range.count, "d count")->required();
  surface_cmd->add_option("--out", surface_args.out, "output path (default stdout)");
  surface_cmd->add_option("--format", surface_args.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  surface_cmd->callback([&] { run_surface(surface_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const FitError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const EvalError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  }
  return 0;
}
