#pragma once

#include <functional>
#include <span>
#include <vector>

namespace coherelab {

/// Fills coeffs[n] = f^{(q)}(center) / q! * scale^(q - base) with q = first + n,
/// i.e. Taylor coefficients of f around `center` in u = (x - center) / scale,
/// pre-divided by scale^base so that high orders stay in range.
using ScaledTaylor =
    std::function<void(double center, double scale, int base, int first, std::span<double> coeffs)>;

struct DividedDifferenceOptions {
  /// Nodes closer than merge_gap * max|node| are replaced by their mean and
  /// treated as one repeated (confluent) node.
  double merge_gap = 1e-8;
  /// A run of sorted nodes [lo, hi] with lo >= taylor_min_ratio * hi is
  /// evaluated from the Taylor expansion about its midpoint instead of the
  /// difference quotient, which loses accuracy geometrically across such runs.
  double taylor_min_ratio = 0.2;
  int max_taylor_terms = 1024;
};

/// Newton divided difference f[x_1, ..., x_n] with repeated nodes allowed.
///
/// Difference quotients are used only across well-separated nodes; any run
/// of clustered nodes is evaluated from the Taylor series of f about the run
/// center, which covers exact repeats (derivatives) and near repeats without
/// cancellation.  `value` is f itself; `taylor` supplies scaled Taylor
/// coefficients wherever `taylor_ok(center)` holds.  When it does not hold
/// the run must consist of identical nodes at which every needed derivative
/// is zero (used for x = 0 in x^d ln x).
class ConfluentDividedDifference {
 public:
  ConfluentDividedDifference(std::function<double(double)> value, ScaledTaylor taylor,
                             std::function<bool(double)> taylor_ok, DividedDifferenceOptions options = {});

  [[nodiscard]] double operator()(std::span<const double> nodes) const;

  /// Nodes after merging near-coincident ones, ascending.
  [[nodiscard]] std::vector<double> canonical_nodes(std::span<const double> nodes) const;

 private:
  [[nodiscard]] double taylor_run(std::span<const double> run) const;

  std::function<double(double)> value_;
  ScaledTaylor taylor_;
  std::function<bool(double)> taylor_ok_;
  DividedDifferenceOptions options_;
};

/// g(x) = -x^power ln x with g(0) = 0, plus its scaled Taylor expansion.
double neg_xpow_log(double x, int power);
void neg_xpow_log_taylor(int power, double center, double scale, int base, int first, std::span<double> coeffs);

}  // namespace coherelab
