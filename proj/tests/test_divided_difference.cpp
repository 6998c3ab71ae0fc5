#include <cmath>
#include <vector>

#include "coherelab/divided_difference.hpp"
#include "doctest.h"

using namespace coherelab;

namespace {

// f(x) = exp(x): f[x_0..x_n] over equal nodes is e^x / n!.
ConfluentDividedDifference exp_dd() {
  return ConfluentDividedDifference(
      [](double x) { return std::exp(x); },
      [](double c, double s, int base, int first, std::span<double> out) {
        double fact = 1.0;
        for (int q = 1; q <= first; ++q) fact *= q;
        for (std::size_t n = 0; n < out.size(); ++n) {
          const int q = first + static_cast<int>(n);
          if (n > 0) fact *= q;
          out[n] = std::exp(c) / fact * std::pow(s, q - base);
        }
      },
      [](double) { return true; });
}

double cubic(double x) { return x * x * x - 2.0 * x + 1.0; }

}  // namespace

TEST_CASE("divided differences of a cubic") {
  const ConfluentDividedDifference dd(
      cubic,
      [](double c, double s, int base, int first, std::span<double> out) {
        const double coeff[] = {cubic(c), 3 * c * c - 2.0, 3 * c, 1.0};
        for (std::size_t n = 0; n < out.size(); ++n) {
          const int q = first + static_cast<int>(n);
          out[n] = q <= 3 ? coeff[q] * std::pow(s, q - base) : 0.0;
        }
      },
      [](double) { return true; });
  // Third divided difference of a monic cubic is 1 for any nodes.
  const std::vector<double> spread{0.1, 0.4, 0.9, 2.0};
  const std::vector<double> tight{0.5, 0.5 + 1e-9, 0.5 + 2e-9, 0.5 + 3e-9};
  const std::vector<double> same{0.7, 0.7, 0.7, 0.7};
  CHECK(dd(spread) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(dd(tight) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(dd(same) == doctest::Approx(1.0).epsilon(1e-13));
  // Second: sum of nodes.
  const std::vector<double> three{0.2, 0.3, 1.5};
  CHECK(dd(three) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("confluent exp divided differences") {
  const auto dd = exp_dd();
  const std::vector<double> four(4, 0.3);
  CHECK(dd(four) == doctest::Approx(std::exp(0.3) / 6.0).epsilon(1e-14));
  const std::vector<double> pair{1.0, 2.0};
  CHECK(dd(pair) == doctest::Approx(std::exp(2.0) - std::exp(1.0)).epsilon(1e-14));
}

TEST_CASE("canonical nodes merge near-coincident clusters") {
  const auto dd = exp_dd();
  const std::vector<double> nodes{0.5, 0.1, 0.5 + 1e-12, 0.3};
  const std::vector<double> canon = dd.canonical_nodes(nodes);
  REQUIRE(canon.size() == 4);
  CHECK(canon[0] == 0.1);
  CHECK(canon[1] == 0.3);
  CHECK(canon[2] == canon[3]);
  CHECK(canon[2] == doctest::Approx(0.5 + 5e-13).epsilon(1e-15));
}

TEST_CASE("neg_xpow_log values and Taylor coefficients") {
  CHECK(neg_xpow_log(0.0, 3) == 0.0);
  CHECK(neg_xpow_log(1.0, 3) == 0.0);
  CHECK(neg_xpow_log(0.5, 2) == doctest::Approx(0.25 * std::log(2.0)).epsilon(1e-15));

  // Compare unscaled coefficients against finite differences of -x^3 ln x.
  const double c = 0.4;
  std::vector<double> coeff(4);
  neg_xpow_log_taylor(3, c, 1.0, 0, 0, coeff);
  CHECK(coeff[0] == doctest::Approx(neg_xpow_log(c, 3)).epsilon(1e-15));
  // g' = -(3 x^2 ln x + x^2), g''/2 = -(6 x ln x + 5 x)/2, g'''/6 = -(6 ln x + 11)/6
  CHECK(coeff[1] == doctest::Approx(-(3 * c * c * std::log(c) + c * c)).epsilon(1e-14));
  CHECK(coeff[2] == doctest::Approx(-(6 * c * std::log(c) + 5 * c) / 2).epsilon(1e-14));
  CHECK(coeff[3] == doctest::Approx(-(6 * std::log(c) + 11) / 6).epsilon(1e-14));
  // Past the polynomial degree: g''''/24 = -6/(24 x).
  std::vector<double> high(1);
  neg_xpow_log_taylor(3, c, 1.0, 0, 4, high);
  CHECK(high[0] == doctest::Approx(-6.0 / (24.0 * c)).epsilon(1e-14));

  // Scaling: coefficient q is multiplied by scale^(q - base).
  std::vector<double> scaled(4);
  neg_xpow_log_taylor(3, c, 0.5, 1, 0, scaled);
  for (int q = 0; q < 4; ++q) CHECK(scaled[q] == doctest::Approx(coeff[q] * std::pow(0.5, q - 1)).epsilon(1e-14));
}
