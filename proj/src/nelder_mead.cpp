#include "scalekit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "scalekit/errors.hpp"

namespace scalekit {

namespace {

Eigen::VectorXd clip(Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const NelderMeadOptions& opts) {
  const Eigen::Index dim = x0.size();
  if (dim == 0) throw ArgumentError("nelder_mead: empty parameter vector");
  if (lo.size() != dim || hi.size() != dim)
    throw ArgumentError("nelder_mead: bound size mismatch");
  for (Eigen::Index i = 0; i < dim; ++i)
    if (!(lo[i] <= hi[i])) throw ArgumentError("nelder_mead: bounds must satisfy lo <= hi");

  std::vector<Eigen::VectorXd> verts;
  std::vector<double> vals;
  auto build_simplex = [&](const Eigen::VectorXd& center, double scale) {
    verts.assign(1, clip(center, lo, hi));
    for (Eigen::Index i = 0; i < dim; ++i) {
      Eigen::VectorXd v = verts[0];
      double step = scale * (hi[i] - lo[i]);
      if (step == 0) step = scale * std::max(1.0, std::abs(v[i]));
      if (v[i] + step > hi[i]) step = -step;
      v[i] += step;
      verts.push_back(clip(v, lo, hi));
    }
    vals.resize(verts.size());
    for (size_t k = 0; k < verts.size(); ++k) vals[k] = objective(verts[k]);
  };

  build_simplex(x0, opts.init_scale);

  auto order = [&] {
    std::vector<size_t> idx(verts.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> nv(verts.size());
    std::vector<double> nf(verts.size());
    for (size_t k = 0; k < idx.size(); ++k) {
      nv[k] = verts[idx[k]];
      nf[k] = vals[idx[k]];
    }
    verts.swap(nv);
    vals.swap(nf);
  };

  auto spread_small = [&] {
    const double fb = vals.front(), fw = vals.back();
    if (!std::isfinite(fb) || !std::isfinite(fw)) return false;
    if (fw - fb <= opts.rel_tol * (std::abs(fb) + opts.rel_tol)) return true;
    double diam = 0;
    for (size_t k = 1; k < verts.size(); ++k)
      diam = std::max(diam, (verts[k] - verts[0]).cwiseAbs().maxCoeff());
    return diam <= opts.rel_tol * (1.0 + verts[0].cwiseAbs().maxCoeff());
  };

  int iters = 0;
  int restarts_left = opts.shrink_restarts;
  bool converged = false;
  order();

  while (iters < opts.max_iters) {
    if (spread_small()) {
      if (restarts_left > 0) {
        --restarts_left;
        build_simplex(verts[0], opts.init_scale * 0.01);
        order();
        ++iters;
        continue;
      }
      converged = true;
      break;
    }
    ++iters;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (size_t k = 0; k + 1 < verts.size(); ++k) centroid += verts[k];
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd& worst = verts.back();
    const double f_best = vals.front();
    const double f_second = vals[verts.size() - 2];
    const double f_worst = vals.back();

    Eigen::VectorXd xr = clip(centroid + (centroid - worst), lo, hi);
    const double fr = objective(xr);

    if (fr < f_best) {
      Eigen::VectorXd xe = clip(centroid + 2.0 * (centroid - worst), lo, hi);
      const double fe = objective(xe);
      if (fe < fr) {
        verts.back() = xe;
        vals.back() = fe;
      } else {
        verts.back() = xr;
        vals.back() = fr;
      }
    } else if (fr < f_second) {
      verts.back() = xr;
      vals.back() = fr;
    } else {
      Eigen::VectorXd xc;
      if (fr < f_worst)
        xc = clip(centroid + 0.5 * (xr - centroid), lo, hi);
      else
        xc = clip(centroid + 0.5 * (worst - centroid), lo, hi);
      const double fc = objective(xc);
      if (fc < std::min(fr, f_worst)) {
        verts.back() = xc;
        vals.back() = fc;
      } else {
        for (size_t k = 1; k < verts.size(); ++k) {
          verts[k] = clip(verts[0] + 0.5 * (verts[k] - verts[0]), lo, hi);
          vals[k] = objective(verts[k]);
        }
      }
    }
    order();
  }

  return {verts.front(), vals.front(), converged, iters};
}

}  // namespace scalekit
