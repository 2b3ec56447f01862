#pragma once

#include <Eigen/Dense>
#include <functional>

namespace scalekit {

struct NelderMeadOptions {
  int max_iters = 2000;
  double rel_tol = 1e-10;       // converged when objective spread / scale < rel_tol
  double init_scale = 0.05;     // initial simplex edge, relative to box width
  int shrink_restarts = 2;      // rebuild a tight simplex around the incumbent
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0;
  bool converged = false;
  int iters = 0;
};

// Box-constrained simplex descent: candidates are clipped to [lo, hi]
// componentwise before evaluation. The objective may return +inf to veto
// a region. Deterministic for identical inputs.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const NelderMeadOptions& opts = {});

}  // namespace scalekit
