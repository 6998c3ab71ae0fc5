#include "coherelab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "coherelab/simplex.hpp"

namespace coherelab {

namespace {

void require_samples(long n, long minimum, const char* what) {
  if (n < minimum) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + " needs at least " + std::to_string(minimum) + " samples");
  }
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EstimateWithError summarize_samples(std::span<const double> samples) {
  EstimateWithError est;
  est.n_samples = static_cast<long>(samples.size());
  if (samples.empty()) return est;
  const double n = static_cast<double>(samples.size());
  est.mean = pairwise_sum(samples) / n;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - est.mean) * (samples[i] - est.mean);
    const double variance = pairwise_sum(sq) / (n - 1.0);
    est.std_error = std::sqrt(variance / n);
  }
  return est;
}

EstimateWithError estimate_average(const DensityMatrix& rho, CoherenceKind kind, long n, RngStream& rng) {
  require_samples(n, 100, "estimate_average");
  const CoherenceEvaluator eval(rho, kind);
  std::vector<double> samples(static_cast<std::size_t>(n));
  for (double& s : samples) s = eval(haar_unitary(rho.dim(), rng).unitary());
  return summarize_samples(samples);
}

EstimateWithError estimate_rms_average_l2(const DensityMatrix& rho, long n, RngStream& rng) {
  require_samples(n, 100, "estimate_rms_average_l2");
  const CoherenceEvaluator eval(rho, CoherenceKind::lp_norm(2.0));
  std::vector<double> squares(static_cast<std::size_t>(n));
  for (double& s : squares) {
    const double c = eval(haar_unitary(rho.dim(), rng).unitary());
    s = c * c;
  }
  const EstimateWithError ms = summarize_samples(squares);
  EstimateWithError out;
  out.n_samples = ms.n_samples;
  out.mean = std::sqrt(std::max(ms.mean, 0.0));
  // d sqrt(m) = dm / (2 sqrt(m)).
  out.std_error = out.mean > 0.0 ? ms.std_error / (2.0 * out.mean) : 0.0;
  return out;
}

ComplexMatrix haar_twirl_target(int d) {
  const int n = d * d;
  return (ComplexMatrix::Identity(n, n) + flip_operator(d)) / static_cast<double>(d * (d + 1));
}

double haar_twirl_deviation(int d, long n, RngStream& rng) {
  if (d < 2 || d > 5) throw Error(ErrorKind::InvalidArgument, "haar_twirl_deviation supports 2 <= d <= 5");
  require_samples(n, 1000, "haar_twirl_deviation");
  const int dd = d * d;
  ComplexMatrix acc = ComplexMatrix::Zero(dd, dd);
  ComplexVector uu(dd);
  for (long s = 0; s < n; ++s) {
    const ComplexMatrix u = haar_unitary(d, rng).unitary();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) uu(i * d + j) = u(i, 0) * u(j, 0);
    }
    acc.noalias() += uu * uu.adjoint();
  }
  acc /= static_cast<double>(n);
  return max_abs(acc - haar_twirl_target(d));
}

ComplexMatrix unitary_from_parameters(std::span<const double> params, int d) {
  const std::size_t expected = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
  if (params.size() != expected) {
    throw Error(ErrorKind::DimensionMismatch, "unitary parameterization needs d^2 parameters");
  }
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  std::size_t k = 0;
  for (int i = 0; i < d; ++i) h(i, i) = params[k++];
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      h(i, j) = Complex(params[k], params[k + 1]);
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  }
  SpectralDecomposition spec = spectral_decompose(h);
  ComplexVector phases(d);
  for (int i = 0; i < d; ++i) phases(i) = std::polar(1.0, spec.eigenvalues(i));
  return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

OptimizationResult maximize_coherence(const DensityMatrix& rho, CoherenceKind kind, long budget, int restarts,
                                      RngStream& rng) {
  const int d = rho.dim();
  if (budget < 100L * d * d) throw Error(ErrorKind::InvalidArgument, "budget must be at least 100 d^2");
  if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");

  const CoherenceEvaluator eval(rho, kind);
  const std::vector<double> origin(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0.0);
  SimplexOptions opts;
  opts.max_evaluations = budget;

  ComplexMatrix best_u;
  double best_value = -std::numeric_limits<double>::infinity();
  long evaluations = 0;
  bool all_converged = true;

  for (int r = 0; r < restarts; ++r) {
    const ComplexMatrix start = r == 0 ? maximizing_basis(rho).unitary() : haar_unitary(d, rng).unitary();
    auto objective = [&](std::span<const double> theta) {
      return -eval(start * unitary_from_parameters(theta, d));
    };
    const SimplexResult res = nelder_mead_minimize(objective, origin, opts);
    evaluations += res.evaluations;
    all_converged = all_converged && res.converged;
    if (-res.value > best_value) {
      best_value = -res.value;
      best_u = start * unitary_from_parameters(res.x, d);
    }
  }

  MeasurementBasis basis(std::move(best_u));
  const double value = eval(basis.unitary());
  return OptimizationResult{value, std::move(basis), evaluations, all_converged};
}

TradeoffSweepSummary inequality_sweep(int d, long n_states, long n_bases_per_state, const RngStream& rng,
                                      const SweepOptions& options) {
  if (d < 2 || d > 16) throw Error(ErrorKind::InvalidArgument, "inequality_sweep supports 2 <= d <= 16");
  if (n_states < 1 || n_bases_per_state < 0) throw Error(ErrorKind::InvalidArgument, "invalid sweep size");

  TradeoffSweepSummary summary;
  summary.dim = d;
  summary.n_states = n_states;
  summary.n_bases = n_bases_per_state;
  summary.seed = rng.seed();
  summary.stream = rng.index();

  const double dd = d;
  const double log_d = std::log(dd);
  const double l1_l2_factor = std::sqrt(dd * (dd - 1.0));
  const double tol = options.violation_tolerance;

  auto record = [&](const std::string& name, double margin) {
    auto [it, inserted] = summary.worst_margin.try_emplace(name, margin);
    if (!inserted) it->second = std::max(it->second, margin);
    long& count = summary.violations[name];
    if (margin > tol) ++count;
  };

  for (long s = 0; s < n_states; ++s) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(s));
    const DensityMatrix rho = random_qudit_state(d, stream);
    const TradeoffReport report = tradeoff_report(rho);
    const CoherenceEvaluator l1(rho, CoherenceKind::lp_norm(1.0));
    const CoherenceEvaluator l2(rho, CoherenceKind::lp_norm(2.0));
    const CoherenceEvaluator rel(rho, CoherenceKind::relative_entropy());
    const CoherenceEvaluator skew(rho, CoherenceKind::skew_information());

    auto check_basis = [&](const MeasurementBasis& basis) {
      const double c_l1 = l1(basis);
      const double c_l2 = l2(basis);
      record("l2_mixedness", dd / (dd - 1.0) * c_l2 * c_l2 + report.M_l - 1.0);
      record("relative_entropy_mixedness", rel(basis) + report.S - log_d);
      record("skew_geometric_mixedness", skew(basis) + report.M_g - 1.0);
      record("l1_l2_norm", c_l1 - l1_l2_factor * c_l2);
      const double triality =
          durr_predictability_sq(rho, basis) + durr_visibility_sq(rho, basis) + report.M_l - 1.0;
      record("durr_triality", std::abs(triality));
    };

    for (long b = 0; b < n_bases_per_state; ++b) check_basis(haar_unitary(d, stream));

    const MeasurementBasis witness = maximizing_basis(rho);
    check_basis(witness);
    const double c_l2_witness = l2(witness);
    record("l2_equality_at_witness", std::abs(dd / (dd - 1.0) * c_l2_witness * c_l2_witness + report.M_l - 1.0));

    record("avg_relative_entropy_mixedness", report.avg_r + report.S - log_d);

    const OptimizationResult l1_max = maximize_coherence(rho, CoherenceKind::lp_norm(1.0),
                                                         options.l1_budget_per_d2 * d * d, options.l1_restarts,
                                                         stream);
    const double ratio = l1_max.best_value / (dd - 1.0);
    record("l1max_mixedness", ratio * ratio + report.M_l - 1.0);
    record("l1max_l2max", l1_max.best_value - l1_l2_factor * report.max_l2);
  }
  return summary;
}

std::vector<double> continuity_epsilons() {
  return {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
}

ContinuityReport subentropy_continuity_check(long n_spectra, int d_min, int d_max, const RngStream& rng) {
  if (d_min < 2 || d_max < d_min) throw Error(ErrorKind::InvalidArgument, "invalid dimension range");
  ContinuityReport report;
  report.n_spectra = n_spectra;
  for (long k = 0; k < n_spectra; ++k) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(k));
    const int d = d_min + static_cast<int>(k % (d_max - d_min + 1));
    std::vector<double> p = random_probabilities(d, stream);
    const auto a = static_cast<std::size_t>(stream.next_u64() % static_cast<std::uint64_t>(d - 1));
    // Collapse the pair (a, a+1) onto its mean.
    const double mean = 0.5 * (p[a] + p[a + 1]);
    p[a] = p[a + 1] = mean;
    const double confluent = subentropy(Spectrum(p));

    double previous = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double eps : continuity_epsilons()) {
      std::vector<double> q = p;
      q[a] += eps;
      for (double& v : q) v /= 1.0 + eps;
      const double gap = std::abs(subentropy(Spectrum(q)) - confluent);
      if (!(gap < previous)) monotone = false;
      previous = gap;
    }
    if (!monotone) ++report.non_monotone;
    report.worst_final_gap = std::max(report.worst_final_gap, previous);
  }
  return report;
}

}  // namespace coherelab
