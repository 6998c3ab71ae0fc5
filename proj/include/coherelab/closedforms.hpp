#pragma once

#include <array>

#include "coherelab/measures.hpp"
#include "coherelab/qstate.hpp"

namespace coherelab {

// Basis-independent averages (over Haar-random bases) and maxima (over all
// bases) of the three coherence quantifiers, as functions of the spectrum.

double rms_avg_coherence_l2(const DensityMatrix& rho);
double avg_coherence_relative_entropy(const DensityMatrix& rho);
double avg_coherence_skew(const DensityMatrix& rho);

double max_coherence_l2(const DensityMatrix& rho);
double max_coherence_relative_entropy(const DensityMatrix& rho);
double max_coherence_skew(const DensityMatrix& rho);

/// Eigenbasis followed by the discrete Fourier transform. In this basis the
/// diagonals of rho and sqrt(rho) are uniform, so all three maxima are hit.
MeasurementBasis maximizing_basis(const DensityMatrix& rho);

/// Spectral invariants from which every closed form is computed.
struct StateInvariants {
  int dim = 0;
  double purity = 0.0;
  double entropy = 0.0;
  double subentropy = 0.0;
  double geometric_mixedness = 0.0;

  static StateInvariants of(const DensityMatrix& rho);
};

/// Closed forms and the signed trade-off residuals (computed - expected).
struct TradeoffReport {
  int dim = 0;
  double purity = 0.0;
  double M_l = 0.0;
  double S = 0.0;
  double M_g = 0.0;
  double Q = 0.0;
  double rms_avg_l2 = 0.0;
  double avg_r = 0.0;
  double avg_sk = 0.0;
  double max_l2 = 0.0;
  double max_r = 0.0;
  double max_sk = 0.0;
  double residual_t1_rms = 0.0;
  double residual_t1_max = 0.0;
  double residual_t2_avg = 0.0;
  double residual_t2_max = 0.0;
  double residual_t3_avg = 0.0;
  double residual_t3_max = 0.0;

  [[nodiscard]] std::array<double, 6> residuals() const {
    return {residual_t1_rms, residual_t1_max, residual_t2_avg, residual_t2_max, residual_t3_avg, residual_t3_max};
  }
};

/// Builds the full report from stored invariants alone; tradeoff_report() is
/// this applied to StateInvariants::of(rho).
TradeoffReport tradeoff_report(const StateInvariants& inv);
TradeoffReport tradeoff_report(const DensityMatrix& rho);

/// Per-residual pass thresholds.
struct ResidualTolerances {
  double t1 = 1e-10;
  double t2_avg = 1e-8;
  double t2_max = 1e-10;
  double t3 = 1e-10;

  static ResidualTolerances uniform(double tol) { return {tol, tol, tol, tol}; }
  [[nodiscard]] bool accepts(const TradeoffReport& r) const;
};

struct RatioDiagnostics {
  double l2 = 0.0;                // rms average / maximum, equals sqrt(d/(d+1))
  double relative_entropy = 0.0;  // average / maximum
  double skew = 0.0;              // average / maximum, equals d/(d+1)
};

/// Throws MaximallyMixedInput when purity - 1/d < 1e-12.
RatioDiagnostics ratio_diagnostics(const DensityMatrix& rho);

}  // namespace coherelab
