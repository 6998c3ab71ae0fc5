#include "coherelab/closedforms.hpp"

#include <algorithm>
#include <cmath>

namespace coherelab {

namespace {

double sqrt_nonneg(double v) { return std::sqrt(std::max(v, 0.0)); }

// P - 1/d computed as ||rho - I/d||_F^2, which is exactly 0 at I/d.
double purity_excess(const DensityMatrix& rho) {
  const int d = rho.dim();
  return (rho.matrix() - ComplexMatrix::Identity(d, d) / static_cast<double>(d)).squaredNorm();
}

double trace_sqrt(const Spectrum& spec) {
  double t = 0.0;
  for (double v : spec.values()) t += std::sqrt(v);
  return t;
}

}  // namespace

StateInvariants StateInvariants::of(const DensityMatrix& rho) {
  const Spectrum spec = Spectrum::of(rho);
  const double ts = trace_sqrt(spec);
  StateInvariants inv;
  inv.dim = rho.dim();
  inv.purity = coherelab::purity(rho);
  inv.entropy = von_neumann_entropy(spec);
  inv.subentropy = coherelab::subentropy(spec);
  inv.geometric_mixedness = ts * ts / rho.dim();
  return inv;
}

double rms_avg_coherence_l2(const DensityMatrix& rho) {
  const double d = rho.dim();
  return sqrt_nonneg(d * purity_excess(rho) / (d + 1.0));
}

double avg_coherence_relative_entropy(const DensityMatrix& rho) {
  const Spectrum spec = Spectrum::of(rho);
  return harmonic_tail(rho.dim()) - (von_neumann_entropy(spec) - subentropy(spec));
}

double avg_coherence_skew(const DensityMatrix& rho) {
  const double d = rho.dim();
  const double ts = trace_sqrt(Spectrum::of(rho));
  return std::max(0.0, (d - ts * ts) / (d + 1.0));
}

double max_coherence_l2(const DensityMatrix& rho) {
  return sqrt_nonneg(purity_excess(rho));
}

double max_coherence_relative_entropy(const DensityMatrix& rho) {
  return std::max(0.0, std::log(static_cast<double>(rho.dim())) - von_neumann_entropy(rho));
}

double max_coherence_skew(const DensityMatrix& rho) {
  return std::max(0.0, 1.0 - geometric_mixedness(rho));
}

MeasurementBasis maximizing_basis(const DensityMatrix& rho) {
  const SpectralDecomposition spec = spectral_decompose(rho);
  return MeasurementBasis(spec.eigenvectors * fourier_basis(rho.dim()).unitary());
}

TradeoffReport tradeoff_report(const StateInvariants& inv) {
  const double d = inv.dim;
  TradeoffReport r;
  r.dim = inv.dim;
  r.purity = inv.purity;
  r.S = inv.entropy;
  r.Q = inv.subentropy;
  r.M_g = inv.geometric_mixedness;
  r.M_l = d / (d - 1.0) * (1.0 - inv.purity);

  const double log_d = std::log(d);
  const double tail = harmonic_tail(inv.dim);
  r.rms_avg_l2 = sqrt_nonneg((d * inv.purity - 1.0) / (d + 1.0));
  r.avg_r = tail - (inv.entropy - inv.subentropy);
  r.avg_sk = std::max(0.0, (d - d * inv.geometric_mixedness) / (d + 1.0));
  r.max_l2 = sqrt_nonneg(inv.purity - 1.0 / d);
  r.max_r = std::max(0.0, log_d - inv.entropy);
  r.max_sk = std::max(0.0, 1.0 - inv.geometric_mixedness);

  r.residual_t1_rms = (d + 1.0) / (d - 1.0) * r.rms_avg_l2 * r.rms_avg_l2 + r.M_l - 1.0;
  r.residual_t1_max = d / (d - 1.0) * r.max_l2 * r.max_l2 + r.M_l - 1.0;
  r.residual_t2_avg = r.avg_r + (r.S - r.Q) - tail;
  r.residual_t2_max = r.max_r + r.S - log_d;
  r.residual_t3_avg = (d + 1.0) / d * r.avg_sk + r.M_g - 1.0;
  r.residual_t3_max = r.max_sk + r.M_g - 1.0;
  return r;
}

TradeoffReport tradeoff_report(const DensityMatrix& rho) {
  return tradeoff_report(StateInvariants::of(rho));
}

bool ResidualTolerances::accepts(const TradeoffReport& r) const {
  return std::abs(r.residual_t1_rms) < t1 && std::abs(r.residual_t1_max) < t1 &&
         std::abs(r.residual_t2_avg) < t2_avg && std::abs(r.residual_t2_max) < t2_max &&
         std::abs(r.residual_t3_avg) < t3 && std::abs(r.residual_t3_max) < t3;
}

RatioDiagnostics ratio_diagnostics(const DensityMatrix& rho) {
  if (purity_excess(rho) < 1e-12) {
    throw Error(ErrorKind::MaximallyMixedInput, "ratios are undefined for the maximally mixed state");
  }
  const TradeoffReport r = tradeoff_report(rho);
  return {r.rms_avg_l2 / r.max_l2, r.avg_r / r.max_r, r.avg_sk / r.max_sk};
}

}  // namespace coherelab
