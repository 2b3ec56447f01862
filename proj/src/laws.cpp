#include "scalekit/laws.hpp"

#include <cmath>
#include <limits>

#include "scalekit/errors.hpp"

namespace scalekit {

namespace {

void check_point(double n, double d) {
  if (!(n >= 1) || !(d >= 1))
    throw ArgumentError("evaluation point must satisfy n >= 1 and d >= 1");
}

// lim_{x -> inf} c * x^q under the sign case table.
double limit_of_power(double c, double q) {
  if (c == 0 || q < 0) return 0;
  if (q == 0) return c;
  return c > 0 ? std::numeric_limits<double>::infinity()
               : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::string family_name(LawFamily family) {
  return family == LawFamily::chinchilla ? "chinchilla" : "farseer";
}

LawFamily family_from_name(const std::string& name) {
  if (name == "chinchilla") return LawFamily::chinchilla;
  if (name == "farseer") return LawFamily::farseer;
  throw ArgumentError("unknown law family \"" + name + "\"");
}

double eval_chinchilla(const ChinchillaLaw& law, double n, double d) {
  check_point(n, d);
  const double term_n = law.coef_a * std::pow(n, -law.exp_a);
  if (!std::isfinite(term_n)) throw EvalError("chinchilla parameter term is non-finite");
  const double term_d = law.coef_b * std::pow(d, -law.exp_b);
  if (!std::isfinite(term_d)) throw EvalError("chinchilla token term is non-finite");
  const double loss = law.e_irr + term_n + term_d;
  if (!std::isfinite(loss)) throw EvalError("chinchilla loss is non-finite");
  return loss;
}

double eval_farseer(const FarseerLaw& law, double n, double d) {
  check_point(n, d);
  const double u1 = law.t1_s * std::pow(n, law.t1_q) + law.t1_S;
  const double term1 = std::exp(u1);
  if (!std::isfinite(term1)) throw EvalError("farseer first term overflows");
  // d^(-e) folded into the exponent: exp(B n^b + Q - e ln d) stays stable
  // where the direct product would overflow or vanish.
  const double e = std::exp(law.ex_A * std::pow(n, law.ex_a) + law.ex_E);
  if (!std::isfinite(e)) throw EvalError("farseer token exponent overflows");
  const double u2 = law.t2_B * std::pow(n, law.t2_b) + law.t2_Q - e * std::log(d);
  const double term2 = std::exp(u2);
  if (!std::isfinite(term2)) throw EvalError("farseer second term overflows");
  const double loss = term1 + term2;
  if (!std::isfinite(loss)) throw EvalError("farseer loss is non-finite");
  return loss;
}

double eval(const LawHandle& law, double n, double d) {
  if (law.family() == LawFamily::chinchilla) return eval_chinchilla(law.chinchilla(), n, d);
  return eval_farseer(law.farseer(), n, d);
}

std::vector<SlicePoint> eval_slice(const LawHandle& law, SliceAxis axis, double fixed_value,
                                   std::span<const double> sweep) {
  if (sweep.size() < 2) throw ArgumentError("eval_slice: sweep needs at least 2 points");
  for (size_t i = 0; i < sweep.size(); ++i) {
    if (!(sweep[i] > 0)) throw ArgumentError("eval_slice: sweep points must be positive");
    if (i > 0 && !(sweep[i] > sweep[i - 1]))
      throw ArgumentError("eval_slice: sweep must be strictly increasing");
  }
  if (!(fixed_value > 0)) throw ArgumentError("eval_slice: fixed value must be positive");

  std::vector<SlicePoint> out;
  out.reserve(sweep.size());
  for (double x : sweep) {
    double loss = 0;
    switch (axis) {
      case SliceAxis::fixed_n:
        loss = eval(law, fixed_value, x);
        break;
      case SliceAxis::fixed_d:
        loss = eval(law, x, fixed_value);
        break;
      case SliceAxis::fixed_dn:
        loss = eval(law, x, std::round(fixed_value * x));
        break;
    }
    out.push_back({x, loss});
  }
  return out;
}

LimitResult asymptotic_limit(const LawHandle& law) {
  constexpr double kInf = std::numeric_limits<double>::infinity();

  if (law.family() == LawFamily::chinchilla) {
    const auto& c = law.chinchilla();
    // A / n^a == A * n^(-a), same for the token term
    const double lim_n = limit_of_power(c.coef_a, -c.exp_a);
    const double lim_d = limit_of_power(c.coef_b, -c.exp_b);
    if (!std::isfinite(lim_n) || !std::isfinite(lim_d))
      return {LimitResult::Kind::divergent, 0};
    return {LimitResult::Kind::finite, c.e_irr + lim_n + lim_d};
  }

  const auto& f = law.farseer();
  const double a1 = limit_of_power(f.t1_s, f.t1_q);
  if (a1 == kInf) return {LimitResult::Kind::divergent, 0};
  const double term1 = std::exp(a1 + f.t1_S);  // exp(-inf) == 0
  if (!std::isfinite(term1)) return {LimitResult::Kind::divergent, 0};

  const double a2 = limit_of_power(f.t2_B, f.t2_b);
  const double prefactor = std::exp(a2 + f.t2_Q);  // inf when a2 == inf
  const bool prefactor_divergent = !std::isfinite(prefactor);

  const double a3 = limit_of_power(f.ex_A, f.ex_a);
  const double d_exponent = std::exp(a3 + f.ex_E);  // 0, finite positive, or inf

  if (prefactor_divergent) {
    // d^0 -> 1 cannot rescue a diverging prefactor; a positive exponent
    // leaves an inf * 0 race that depends on the approach path.
    if (d_exponent == 0) return {LimitResult::Kind::divergent, 0};
    return {LimitResult::Kind::path_dependent, 0};
  }
  if (d_exponent == 0) return {LimitResult::Kind::finite, term1 + prefactor};
  // positive exponent: d^(-e) -> 0 kills the finite prefactor
  return {LimitResult::Kind::finite, term1};
}

}  // namespace scalekit
