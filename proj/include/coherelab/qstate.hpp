#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace coherelab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class ErrorKind {
  NotSquare,
  NonFinite,
  NotApproxHermitian,
  NegativeEigenvalue,
  TraceFarFromOne,
  EigensolverFailure,
  DimensionMismatch,
  InvalidArgument,
  InvalidP,
  DegenerateDraw,
  MaximallyMixedInput,
  ParseError,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kHermitianInput = 1e-8;
inline constexpr double kTrace = 1e-12;
inline constexpr double kTraceInput = 1e-6;
inline constexpr double kNegativeEigenvalue = 1e-10;
inline constexpr double kUnitary = 1e-10;
/// Per-dimension eigensolver noise floor for unit-trace states.
inline constexpr double kEigenNoise = 16 * std::numeric_limits<double>::epsilon();
}  // namespace tol

/// Validated quantum state: Hermitian, unit trace, positive semidefinite.
/// Only obtainable through validate_density() and the generators below.
class DensityMatrix {
 public:
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(m_.rows()); }
  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  friend DensityMatrix validate_density(const ComplexMatrix& raw);

  ComplexMatrix m_;
};

/// Eigenvalues in descending order; eigenvectors are the matching columns.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  [[nodiscard]] ComplexMatrix reconstruct() const;
};

/// A d x d unitary; column i is the i-th measurement direction.
class MeasurementBasis {
 public:
  /// Throws InvalidArgument when ||U^dag U - I||_max exceeds tol::kUnitary.
  explicit MeasurementBasis(ComplexMatrix unitary);

  static MeasurementBasis computational(int d);

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(u_.rows()); }
  [[nodiscard]] const ComplexMatrix& unitary() const noexcept { return u_; }
  [[nodiscard]] double unitarity_residual() const;

 private:
  ComplexMatrix u_;
};

/// Deterministic random stream identified by (master seed, stream index).
/// Equal identifiers produce equal sequences; distinct indices are
/// decorrelated through seed_seq mixing.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t index() const noexcept { return index_; }

  /// Independent child stream; children of distinct parents do not collide.
  [[nodiscard]] RngStream substream(std::uint64_t child) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on the open interval (0, 1).
  double uniform_open01();
  /// Uniform on [lo, hi].
  double uniform(double lo, double hi);
  double standard_normal();

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

DensityMatrix validate_density(const ComplexMatrix& raw);

SpectralDecomposition spectral_decompose(const ComplexMatrix& hermitian);
SpectralDecomposition spectral_decompose(const DensityMatrix& rho);

ComplexMatrix matrix_sqrt(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

/// Swap operator on C^d (x) C^d, index convention |i j> -> i*d + j.
ComplexMatrix flip_operator(int d);

DensityMatrix maximally_mixed_state(int d);
DensityMatrix maximally_coherent_state(int d);
/// Diagonal state with the given probabilities.
DensityMatrix diagonal_state(std::span<const double> probabilities);
/// |psi><psi| for a (not necessarily normalized) nonzero vector.
DensityMatrix pure_state(const ComplexVector& psi);
/// sum_k p_k v_k v_k^dag for orthonormal columns v_k.
DensityMatrix state_from_spectrum(std::span<const double> probabilities, const ComplexMatrix& eigenvectors);

MeasurementBasis fourier_basis(int d);

/// Ginibre QR with the diagonal phase fix, which is exactly Haar distributed.
MeasurementBasis haar_unitary(int d, RngStream& rng);

/// Normalizes q_1 = u_1, q_{k+1} = u_{k+1} q_k into descending probabilities.
std::vector<double> probabilities_from_uniforms(std::span<const double> uniforms);
std::vector<double> random_probabilities(int d, RngStream& rng);

/// Hermitian matrix assembled from a real matrix R: D + (U^T + U) + i(L^T - L)
/// with D, U, L the diagonal, strictly upper and strictly lower parts of R.
ComplexMatrix hermitian_from_real(const Eigen::MatrixXd& r);
ComplexMatrix random_hermitian(int d, RngStream& rng);

DensityMatrix random_qudit_state(int d, RngStream& rng);

double max_abs(const ComplexMatrix& m);
double hermiticity_residual(const ComplexMatrix& m);

}  // namespace coherelab
