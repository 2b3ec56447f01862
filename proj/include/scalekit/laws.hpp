#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace scalekit {

struct RunRecord {
  double n_params = 0;  // non-embedding parameters, raw count
  double d_tokens = 0;  // training tokens, raw count
  double loss = 0;      // opaque positive unit
  std::string mixture;  // empty means unlabeled
  std::map<std::string, std::string> meta;  // gbz, gpus, mbz
};

// L(n, d) = e_irr + coef_a / n^exp_a + coef_b / d^exp_b
struct ChinchillaLaw {
  double e_irr = 0;
  double coef_a = 0;
  double exp_a = 0;
  double coef_b = 0;
  double exp_b = 0;
};

// L(n, d) = exp(t1_s * n^t1_q + t1_S)
//         + exp(t2_B * n^t2_b + t2_Q) * d^(-exp(ex_A * n^ex_a + ex_E))
// The two groups reuse one-letter names with different meanings; the
// field prefixes keep them apart.
struct FarseerLaw {
  double t1_s = 0;
  double t1_q = 0;
  double t1_S = 0;
  double t2_B = 0;
  double t2_b = 0;
  double t2_Q = 0;
  double ex_A = 0;
  double ex_a = 0;
  double ex_E = 0;
};

enum class LawFamily { chinchilla, farseer };

struct LawHandle {
  std::variant<ChinchillaLaw, FarseerLaw> params;
  std::string provenance;

  LawFamily family() const {
    return std::holds_alternative<ChinchillaLaw>(params) ? LawFamily::chinchilla
                                                         : LawFamily::farseer;
  }
  const ChinchillaLaw& chinchilla() const { return std::get<ChinchillaLaw>(params); }
  const FarseerLaw& farseer() const { return std::get<FarseerLaw>(params); }
};

std::string family_name(LawFamily family);
LawFamily family_from_name(const std::string& name);

double eval_chinchilla(const ChinchillaLaw& law, double n, double d);
double eval_farseer(const FarseerLaw& law, double n, double d);
double eval(const LawHandle& law, double n, double d);

enum class SliceAxis { fixed_n, fixed_d, fixed_dn };

struct SlicePoint {
  double x = 0;
  double loss = 0;
};

// fixed_n sweeps d, fixed_d sweeps n, fixed_dn sweeps n with
// d = round(ratio * n).
std::vector<SlicePoint> eval_slice(const LawHandle& law, SliceAxis axis,
                                   double fixed_value, std::span<const double> sweep);

struct LimitResult {
  enum class Kind { finite, divergent, path_dependent };
  Kind kind = Kind::finite;
  double value = 0;  // meaningful only when kind == finite
};

// Joint N, D -> infinity limit by sign case analysis, never by sampling.
LimitResult asymptotic_limit(const LawHandle& law);

}  // namespace scalekit
