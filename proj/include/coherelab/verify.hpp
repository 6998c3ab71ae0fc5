#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "coherelab/closedforms.hpp"
#include "coherelab/measures.hpp"
#include "coherelab/qstate.hpp"

namespace coherelab {

/// Monte Carlo estimate: standard error is the unbiased sample standard
/// deviation over sqrt(n).
struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
};

struct OptimizationResult {
  double best_value = 0.0;
  MeasurementBasis best_basis;
  long evaluations = 0;
  bool converged = false;
};

/// Pairwise (cascade) summation; the result depends only on the sequence.
double pairwise_sum(std::span<const double> values);

/// Mean and standard error of a sample, both via pairwise summation.
EstimateWithError summarize_samples(std::span<const double> samples);

/// Mean of C(rho, U Pi U^dag) over n Haar-random U drawn from `rng`.
EstimateWithError estimate_average(const DensityMatrix& rho, CoherenceKind kind, long n, RngStream& rng);

/// sqrt of the Haar mean of C_l2^2, error propagated by the delta method.
EstimateWithError estimate_rms_average_l2(const DensityMatrix& rho, long n, RngStream& rng);

/// (I + F) / (d (d + 1)), the Haar average of (U|0><0|U^dag)^{(x)2}.
ComplexMatrix haar_twirl_target(int d);

/// Max-norm distance between the empirical twirl over n samples and the target.
double haar_twirl_deviation(int d, long n, RngStream& rng);

/// exp(iH) for the Hermitian H whose diagonal is params[0..d) and whose upper
/// triangle (row-major) takes real and imaginary parts from the rest.
ComplexMatrix unitary_from_parameters(std::span<const double> params, int d);

/// Derivative-free maximization of C(rho, U Pi U^dag) over U = U_0 exp(iH).
/// The first start U_0 is maximizing_basis(rho); the remaining restarts-1 are
/// Haar random. `budget` caps evaluations per start; when any start runs out
/// the result is still the best found, with converged = false.
OptimizationResult maximize_coherence(const DensityMatrix& rho, CoherenceKind kind, long budget, int restarts,
                                      RngStream& rng);

struct SweepOptions {
  /// Settings for the optimizer that lower-bounds C_l1^max per state.
  long l1_budget_per_d2 = 100;
  int l1_restarts = 1;
  double violation_tolerance = 1e-10;
};

struct TradeoffSweepSummary {
  int dim = 0;
  long n_states = 0;
  long n_bases = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::map<std::string, long> violations;
  std::map<std::string, double> worst_margin;

  friend bool operator==(const TradeoffSweepSummary&, const TradeoffSweepSummary&) = default;
};

/// Evaluates every basis-dependent trade-off inequality on n_states random
/// states times n_bases Haar bases (plus the maximizing basis), and the
/// per-state bounds on the l1 maximum.  Margins are signed lhs - rhs; a
/// violation is a margin above options.violation_tolerance.  State k uses
/// rng.substream(k), so the summary does not depend on evaluation order.
TradeoffSweepSummary inequality_sweep(int d, long n_states, long n_bases_per_state, const RngStream& rng,
                                      const SweepOptions& options = {});

struct ContinuityReport {
  long n_spectra = 0;
  /// Spectra whose gap sequence |Q(gap eps) - Q(confluent)| failed to shrink
  /// strictly as eps went 1e-3, 1e-4, ..., 1e-9.
  long non_monotone = 0;
  /// Largest |Q(gap 1e-9) - Q(confluent)| seen.
  double worst_final_gap = 0.0;
};

/// The perturbation steps used by subentropy_continuity_check.
std::vector<double> continuity_epsilons();

/// Draws spectra of dimension in [d_min, d_max], forces one adjacent pair to
/// coincide, then splits it again by eps (renormalized) and tracks the change
/// in subentropy. Spectrum k uses rng.substream(k).
ContinuityReport subentropy_continuity_check(long n_spectra, int d_min, int d_max, const RngStream& rng);

}  // namespace coherelab
