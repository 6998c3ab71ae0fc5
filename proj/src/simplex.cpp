#include "coherelab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coherelab {

SimplexResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> start, const SimplexOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead_minimize: empty start point");
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 0.5 / dn;
  const double delta = 1.0 - 1.0 / dn;

  SimplexResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };

  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(start.begin(), start.end()));
  std::vector<double> vals(n + 1);
  for (std::size_t i = 1; i <= n; ++i) pts[i][i - 1] += options.initial_step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  auto point = [&](std::vector<double>& out, double t) {
    // out = centroid + t * (centroid - worst)
    const auto& worst = pts[order[n]];
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (centroid[k] - worst[k]);
  };

  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Stable ordering keeps ties deterministic.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });

    const auto& best = pts[order[0]];
    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(pts[order[i]][k] - best[k]));
    }
    if (diameter < options.x_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[order[i]][k];
    }
    for (double& c : centroid) c /= dn;

    const double f_best = vals[order[0]];
    const double f_second_worst = vals[order[n - 1]];
    const double f_worst = vals[order[n]];

    point(xr, alpha);
    const double fr = eval(xr);
    if (fr < f_best) {
      point(xe, beta);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[order[n]] = xe;
        vals[order[n]] = fe;
      } else {
        pts[order[n]] = xr;
        vals[order[n]] = fr;
      }
      continue;
    }
    if (fr < f_second_worst) {
      pts[order[n]] = xr;
      vals[order[n]] = fr;
      continue;
    }
    // Outside contraction when the reflection beat the worst, inside otherwise.
    const bool outside = fr < f_worst;
    point(xc, outside ? gamma : -gamma);
    const double fc = eval(xc);
    if (fc < (outside ? fr : f_worst)) {
      pts[order[n]] = xc;
      vals[order[n]] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      auto& p = pts[order[i]];
      for (std::size_t k = 0; k < n; ++k) p[k] = best[k] + delta * (p[k] - best[k]);
      vals[order[i]] = eval(p);
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  result.value = *it;
  result.x = pts[static_cast<std::size_t>(it - vals.begin())];
  return result;
}

}  // namespace coherelab
