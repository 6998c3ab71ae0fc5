#include "coherelab/divided_difference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coherelab {

ConfluentDividedDifference::ConfluentDividedDifference(std::function<double(double)> value, ScaledTaylor taylor,
                                                       std::function<bool(double)> taylor_ok,
                                                       DividedDifferenceOptions options)
    : value_(std::move(value)), taylor_(std::move(taylor)), taylor_ok_(std::move(taylor_ok)), options_(options) {}

std::vector<double> ConfluentDividedDifference::canonical_nodes(std::span<const double> nodes) const {
  std::vector<double> x(nodes.begin(), nodes.end());
  std::sort(x.begin(), x.end());
  if (x.empty()) return x;
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double gap = options_.merge_gap * scale;

  // Single-linkage clusters of consecutive nodes, each replaced by its mean.
  std::size_t start = 0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    if (i < x.size() && x[i] - x[i - 1] < gap) continue;
    if (i - start > 1) {
      double mean = 0.0;
      for (std::size_t k = start; k < i; ++k) mean += x[k];
      mean /= static_cast<double>(i - start);
      for (std::size_t k = start; k < i; ++k) x[k] = mean;
    }
    start = i;
  }
  return x;
}

double ConfluentDividedDifference::taylor_run(std::span<const double> run) const {
  const double lo = run.front();
  const double hi = run.back();
  const double center = 0.5 * (lo + hi);
  if (!taylor_ok_(center)) {
    if (lo != hi) throw std::logic_error("divided difference: Taylor expansion unavailable for a spread run");
    return 0.0;
  }
  const int k = static_cast<int>(run.size());
  const int base = k - 1;
  const double scale = std::abs(center);

  std::vector<double> u(run.size());
  double umax = 0.0;
  for (std::size_t l = 0; l < run.size(); ++l) {
    u[l] = (run[l] - center) / scale;
    umax = std::max(umax, std::abs(u[l]));
  }

  // f[run] = sum_m c_{base+m} h_m(u), h_m the complete homogeneous symmetric
  // polynomial of degree m in the scaled offsets. partial[l][m] holds h_m of
  // the first l+1 offsets so the table can grow a chunk at a time.
  constexpr int kChunk = 32;
  std::vector<double> coeffs;
  std::vector<std::vector<double>> partial(run.size());
  double sum = 0.0;
  double coeff_bound = 0.0;
  while (static_cast<int>(coeffs.size()) < options_.max_taylor_terms) {
    const std::size_t done = coeffs.size();
    const std::size_t end = done + kChunk;
    coeffs.resize(end);
    taylor_(center, scale, base, base + static_cast<int>(done), std::span<double>(coeffs).subspan(done));
    if (umax == 0.0) return coeffs[0];

    for (std::size_t l = 0; l < u.size(); ++l) {
      auto& row = partial[l];
      row.resize(end);
      for (std::size_t m = done; m < end; ++m) {
        const double prev_var = l > 0 ? partial[l - 1][m] : (m == 0 ? 1.0 : 0.0);
        row[m] = prev_var + (m > 0 ? u[l] * row[m - 1] : 0.0);
      }
    }
    const auto& h = partial.back();
    double chunk_sum = 0.0;
    for (std::size_t m = end; m-- > done;) {
      chunk_sum += coeffs[m] * h[m];
      coeff_bound = std::max(coeff_bound, std::abs(coeffs[m]));
    }
    sum += chunk_sum;

    // |h_m| <= C(m+k-1, k-1) umax^m bounds the neglected tail.
    double binom = 1.0;
    for (int i = 1; i <= k - 1; ++i) binom *= static_cast<double>(static_cast<int>(end) + i - 1) / i;
    const double tail = 4.0 * coeff_bound * binom * std::pow(umax, static_cast<double>(end)) / (1.0 - umax);
    if (tail <= 1e-17 * std::abs(sum) || tail < 1e-300) return sum;
  }
  return sum;
}

double ConfluentDividedDifference::operator()(std::span<const double> nodes) const {
  const std::vector<double> x = canonical_nodes(nodes);
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("divided difference needs at least one node");

  auto close = [&](std::size_t i, std::size_t j) {
    if (x[i] == x[j]) return true;
    return x[i] > 0.0 && x[i] >= options_.taylor_min_ratio * x[j] && taylor_ok_(0.5 * (x[i] + x[j]));
  };

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = value_(x[i]);
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i + j < n; ++i) {
      if (close(i, i + j)) {
        t[i] = taylor_run(std::span<const double>(x).subspan(i, j + 1));
      } else {
        t[i] = (t[i + 1] - t[i]) / (x[i + j] - x[i]);
      }
    }
  }
  return t[0];
}

double neg_xpow_log(double x, int power) {
  if (x == 0.0) return 0.0;
  return -std::pow(x, power) * std::log(x);
}

void neg_xpow_log_taylor(int power, double center, double scale, int base, int first, std::span<double> coeffs) {
  // x = c (1 + v): x^D ln x = c^D (1+v)^D (ln c + ln(1+v)); the coefficient
  // of v^q is c^D [C(D,q) ln c + sum_{j>=1} C(D,q-j) (-1)^{j+1} / j], and the
  // Taylor coefficient in (x - c) is that divided by c^q.
  const int d = power;
  const double log_c = std::log(center);
  const double ratio = scale / center;
  std::vector<double> binom(static_cast<std::size_t>(d) + 1);
  binom[0] = 1.0;
  for (int i = 1; i <= d; ++i) {
    binom[static_cast<std::size_t>(i)] = binom[static_cast<std::size_t>(i - 1)] * (d - i + 1) / i;
  }
  const double lead = -std::pow(center, d - base);

  for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
    const int q = first + static_cast<int>(idx);
    double b = q <= d ? binom[static_cast<std::size_t>(q)] * log_c : 0.0;
    for (int j = std::max(1, q - d); j <= q; ++j) {
      const double term = binom[static_cast<std::size_t>(q - j)] / j;
      b += (j % 2 == 1) ? term : -term;
    }
    coeffs[idx] = lead * std::pow(ratio, q - base) * b;
  }
}

}  // namespace coherelab
