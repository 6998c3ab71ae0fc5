#include "coherelab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "coherelab/divided_difference.hpp"

namespace coherelab {

namespace {

constexpr double kEntropyClamp = 1e-12;

void require_same_dim(const DensityMatrix& rho, const MeasurementBasis& basis) {
  if (rho.dim() != basis.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "state has dimension " + std::to_string(rho.dim()) + ", basis " + std::to_string(basis.dim()));
  }
}

double clamp_round_off(double v) {
  return (v < 0.0 && v > -kEntropyClamp) ? 0.0 : v;
}

ComplexMatrix rotated(const ComplexMatrix& m, const ComplexMatrix& u) {
  return u.adjoint() * m * u;
}

double offdiag_lp(const ComplexMatrix& m, double p) {
  const Eigen::Index d = m.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const double a = std::abs(m(i, j));
      if (p == 1.0) sum += a;
      else if (p == 2.0) sum += a * a;
      else sum += std::pow(a, p);
    }
  }
  if (p == 1.0) return sum;
  if (p == 2.0) return std::sqrt(sum);
  return std::pow(sum, 1.0 / p);
}

}  // namespace

// ---------------------------------------------------------------------------

CoherenceKind CoherenceKind::lp_norm(double p) {
  if (!std::isfinite(p) || p < 1.0) throw Error(ErrorKind::InvalidP, "l_p coherence needs finite p >= 1");
  return CoherenceKind(Tag::LpNorm, p);
}

std::string CoherenceKind::name() const {
  switch (tag_) {
    case Tag::RelativeEntropy: return "relative_entropy";
    case Tag::SkewInformation: return "skew_information";
    case Tag::LpNorm: break;
  }
  if (p_ == 1.0) return "l1";
  if (p_ == 2.0) return "l2";
  std::ostringstream os;
  os << "lp(" << p_ << ")";
  return os.str();
}

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "empty spectrum");
  std::sort(values_.begin(), values_.end(), std::greater<>());
  double sum = 0.0;
  for (double& v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "spectrum entry is not finite");
    if (v < 0.0) {
      if (v < -kEntropyClamp) throw Error(ErrorKind::InvalidArgument, "negative spectrum entry");
      v = 0.0;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw Error(ErrorKind::InvalidArgument, "spectrum does not sum to 1");
}

Spectrum Spectrum::of(const DensityMatrix& rho) {
  const SpectralDecomposition spec = spectral_decompose(rho);
  std::vector<double> values(spec.eigenvalues.begin(), spec.eigenvalues.end());
  double sum = 0.0;
  for (double& v : values) sum += (v = std::max(v, 0.0));
  for (double& v : values) v /= sum;
  return Spectrum(std::move(values));
}

// ---------------------------------------------------------------------------

CoherenceEvaluator::CoherenceEvaluator(const DensityMatrix& rho, CoherenceKind kind) : kind_(kind) {
  switch (kind.tag()) {
    case CoherenceKind::Tag::LpNorm:
      target_ = rho.matrix();
      break;
    case CoherenceKind::Tag::RelativeEntropy:
      target_ = rho.matrix();
      entropy_ = von_neumann_entropy(rho);
      break;
    case CoherenceKind::Tag::SkewInformation:
      target_ = matrix_sqrt(rho);
      break;
  }
}

double CoherenceEvaluator::operator()(const MeasurementBasis& basis) const {
  if (basis.dim() != dim()) throw Error(ErrorKind::DimensionMismatch, "basis dimension does not match state");
  return (*this)(basis.unitary());
}

double CoherenceEvaluator::operator()(const ComplexMatrix& unitary) const {
  const Eigen::Index d = target_.rows();
  switch (kind_.tag()) {
    case CoherenceKind::Tag::LpNorm:
      return offdiag_lp(rotated(target_, unitary), kind_.p());
    case CoherenceKind::Tag::RelativeEntropy: {
      // Only the diagonal <u_i|rho|u_i> is needed.
      std::vector<double> diag(static_cast<std::size_t>(d));
      for (Eigen::Index i = 0; i < d; ++i) {
        diag[static_cast<std::size_t>(i)] = unitary.col(i).dot(target_ * unitary.col(i)).real();
      }
      return clamp_round_off(shannon_entropy(diag) - entropy_);
    }
    case CoherenceKind::Tag::SkewInformation: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double v = unitary.col(i).dot(target_ * unitary.col(i)).real();
        sum += v * v;
      }
      return clamp_round_off(1.0 - sum);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------

double shannon_entropy(std::span<const double> probabilities) {
  double s = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return clamp_round_off(s);
}

DensityMatrix dephase(const DensityMatrix& rho, const MeasurementBasis& basis) {
  require_same_dim(rho, basis);
  const ComplexMatrix& u = basis.unitary();
  const int d = rho.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double w = u.col(i).dot(rho.matrix() * u.col(i)).real();
    out += w * (u.col(i) * u.col(i).adjoint());
  }
  return validate_density(out);
}

double coherence_lp(const DensityMatrix& rho, const MeasurementBasis& basis, double p) {
  const CoherenceKind kind = CoherenceKind::lp_norm(p);
  require_same_dim(rho, basis);
  return CoherenceEvaluator(rho, kind)(basis.unitary());
}

double coherence_relative_entropy(const DensityMatrix& rho, const MeasurementBasis& basis) {
  require_same_dim(rho, basis);
  return CoherenceEvaluator(rho, CoherenceKind::relative_entropy())(basis.unitary());
}

double coherence_skew_information(const DensityMatrix& rho, const MeasurementBasis& basis) {
  require_same_dim(rho, basis);
  return CoherenceEvaluator(rho, CoherenceKind::skew_information())(basis.unitary());
}

double coherence(const DensityMatrix& rho, const MeasurementBasis& basis, CoherenceKind kind) {
  require_same_dim(rho, basis);
  return CoherenceEvaluator(rho, kind)(basis.unitary());
}

double von_neumann_entropy(const Spectrum& spectrum) {
  return shannon_entropy(spectrum.values());
}

double von_neumann_entropy(const DensityMatrix& rho) {
  return von_neumann_entropy(Spectrum::of(rho));
}

double linear_entropy_mixedness(const DensityMatrix& rho) {
  const double d = rho.dim();
  return d / (d - 1.0) * (1.0 - purity(rho));
}

double geometric_mixedness(const DensityMatrix& rho) {
  const Spectrum spec = Spectrum::of(rho);
  double trace_sqrt = 0.0;
  for (double v : spec.values()) trace_sqrt += std::sqrt(v);
  return trace_sqrt * trace_sqrt / rho.dim();
}

double subentropy(const Spectrum& spectrum) {
  // With g_p(x) = -x^p ln x = x g_{p-1}(x), a node at zero peels off exactly:
  // g_p[0, X] = g_{p-1}[X]. The subentropy of a rank-r state is therefore the
  // order r-1 divided difference of g_r over its nonzero eigenvalues.
  std::vector<double> nodes;
  for (double v : spectrum.values()) {
    if (v > 0.0) nodes.push_back(v);
  }
  const int power = static_cast<int>(nodes.size());
  if (power <= 1) return power == 1 ? clamp_round_off(neg_xpow_log(nodes[0], 1)) : 0.0;
  const ConfluentDividedDifference dd(
      [power](double x) { return neg_xpow_log(x, power); },
      [power](double c, double s, int base, int first, std::span<double> out) {
        neg_xpow_log_taylor(power, c, s, base, first, out);
      },
      [](double c) { return c > 0.0; });
  return clamp_round_off(dd(nodes));
}

double harmonic_tail(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "harmonic tail needs d >= 2");
  double sum = 0.0;
  // Smallest terms first.
  for (int k = d; k >= 2; --k) sum += 1.0 / k;
  return sum;
}

double durr_predictability_sq(const DensityMatrix& rho, const MeasurementBasis& basis) {
  require_same_dim(rho, basis);
  const int d = rho.dim();
  const ComplexMatrix& u = basis.unitary();
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    const double diff = u.col(i).dot(rho.matrix() * u.col(i)).real() - 1.0 / d;
    sum += diff * diff;
  }
  return d / (d - 1.0) * sum;
}

double durr_visibility_sq(const DensityMatrix& rho, const MeasurementBasis& basis) {
  require_same_dim(rho, basis);
  const double d = rho.dim();
  const double l2 = offdiag_lp(rotated(rho.matrix(), basis.unitary()), 2.0);
  return d / (d - 1.0) * l2 * l2;
}

}  // namespace coherelab
