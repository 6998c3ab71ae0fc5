#pragma once

#include <functional>
#include <span>
#include <vector>

namespace coherelab {

struct SimplexOptions {
  double initial_step = 0.2;
  /// Converged once every vertex lies within this max-norm distance of the best.
  double x_tolerance = 1e-9;
  long max_evaluations = 10000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization with dimension-adaptive coefficients
/// (reflect 1, expand 1+2/n, contract 3/4-1/(2n), shrink 1-1/n).
SimplexResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> start, const SimplexOptions& options);

}  // namespace coherelab
