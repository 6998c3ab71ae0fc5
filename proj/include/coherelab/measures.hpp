#pragma once

#include <span>
#include <string>
#include <vector>

#include "coherelab/qstate.hpp"

namespace coherelab {

/// Which basis-dependent coherence quantifier to evaluate.
class CoherenceKind {
 public:
  enum class Tag { LpNorm, RelativeEntropy, SkewInformation };

  static CoherenceKind lp_norm(double p);
  static CoherenceKind relative_entropy() { return CoherenceKind(Tag::RelativeEntropy, 0.0); }
  static CoherenceKind skew_information() { return CoherenceKind(Tag::SkewInformation, 0.0); }

  [[nodiscard]] Tag tag() const noexcept { return tag_; }
  [[nodiscard]] double p() const noexcept { return p_; }
  /// "l1", "l2", "lp(1.5)", "relative_entropy", "skew_information".
  [[nodiscard]] std::string name() const;

  friend bool operator==(const CoherenceKind&, const CoherenceKind&) = default;

 private:
  CoherenceKind(Tag tag, double p) : tag_(tag), p_(p) {}
  Tag tag_;
  double p_;
};

/// Eigenvalues of a state: descending, nonnegative, summing to one.
class Spectrum {
 public:
  /// Sorts descending; clamps round-off negatives above -1e-12; throws
  /// InvalidArgument on anything more negative or a sum off by more than 1e-10.
  explicit Spectrum(std::vector<double> values);
  static Spectrum of(const DensityMatrix& rho);

  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
};

/// Coherence of a fixed state in arbitrary bases; caches sqrt(rho) and S(rho)
/// so repeated evaluation (Monte Carlo, optimization) costs one conjugation.
class CoherenceEvaluator {
 public:
  CoherenceEvaluator(const DensityMatrix& rho, CoherenceKind kind);

  /// `unitary` is trusted to be unitary and of matching dimension.
  [[nodiscard]] double operator()(const ComplexMatrix& unitary) const;
  [[nodiscard]] double operator()(const MeasurementBasis& basis) const;

  [[nodiscard]] CoherenceKind kind() const noexcept { return kind_; }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(target_.rows()); }

 private:
  CoherenceKind kind_;
  ComplexMatrix target_;  // rho, or sqrt(rho) for skew information
  double entropy_ = 0.0;
};

/// Shannon entropy (natural log) with 0 ln 0 = 0.
double shannon_entropy(std::span<const double> probabilities);

DensityMatrix dephase(const DensityMatrix& rho, const MeasurementBasis& basis);

double coherence_lp(const DensityMatrix& rho, const MeasurementBasis& basis, double p);
double coherence_relative_entropy(const DensityMatrix& rho, const MeasurementBasis& basis);
double coherence_skew_information(const DensityMatrix& rho, const MeasurementBasis& basis);
double coherence(const DensityMatrix& rho, const MeasurementBasis& basis, CoherenceKind kind);

double von_neumann_entropy(const Spectrum& spectrum);
double von_neumann_entropy(const DensityMatrix& rho);
double linear_entropy_mixedness(const DensityMatrix& rho);
double geometric_mixedness(const DensityMatrix& rho);

/// Q = -sum_k (prod_{l != k} l_k / (l_k - l_l)) l_k ln l_k, evaluated as the
/// confluent divided difference of -x^d ln x over the eigenvalues so that
/// repeated eigenvalues are handled exactly.
double subentropy(const Spectrum& spectrum);

/// 1/2 + 1/3 + ... + 1/d.
double harmonic_tail(int d);

double durr_predictability_sq(const DensityMatrix& rho, const MeasurementBasis& basis);
double durr_visibility_sq(const DensityMatrix& rho, const MeasurementBasis& basis);

}  // namespace coherelab
