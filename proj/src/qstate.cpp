#include "coherelab/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace coherelab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotApproxHermitian: return "NotApproxHermitian";
    case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorKind::TraceFarFromOne: return "TraceFarFromOne";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::DegenerateDraw: return "DegenerateDraw";
    case ErrorKind::MaximallyMixedInput: return "MaximallyMixedInput";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

// ---------------------------------------------------------------------------
// MeasurementBasis

MeasurementBasis::MeasurementBasis(ComplexMatrix unitary) : u_(std::move(unitary)) {
  if (u_.rows() != u_.cols()) throw Error(ErrorKind::NotSquare, "basis matrix is not square");
  if (u_.rows() < 1) throw Error(ErrorKind::InvalidArgument, "empty basis");
  if (const double r = unitarity_residual(); !(r <= tol::kUnitary)) {
    throw Error(ErrorKind::InvalidArgument, "basis is not unitary (residual " + std::to_string(r) + ")");
  }
}

MeasurementBasis MeasurementBasis::computational(int d) {
  return MeasurementBasis(ComplexMatrix::Identity(d, d));
}

double MeasurementBasis::unitarity_residual() const {
  return max_abs(u_.adjoint() * u_ - ComplexMatrix::Identity(u_.rows(), u_.cols()));
}

// ---------------------------------------------------------------------------
// RngStream

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x636f6865u};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index), engine_(make_engine(seed, index)) {}

RngStream RngStream::substream(std::uint64_t child) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(index_ + 0x51ed270b27ULL)), child);
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open01() {
  double u = 0.0;
  while (u == 0.0) u = uniform01();
  return u;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::standard_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(phi);
  has_cached_normal_ = true;
  return r * std::cos(phi);
}

// ---------------------------------------------------------------------------
// Validation and spectral machinery

SpectralDecomposition spectral_decompose(const ComplexMatrix& hermitian) {
  if (hermitian.rows() != hermitian.cols()) throw Error(ErrorKind::NotSquare, "matrix is not square");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::EigensolverFailure, "Hermitian eigensolver did not converge");
  }
  // Eigen sorts ascending.
  const Eigen::Index n = hermitian.rows();
  SpectralDecomposition out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

SpectralDecomposition spectral_decompose(const DensityMatrix& rho) {
  SpectralDecomposition spec = spectral_decompose(rho.matrix());
  // Eigenvalues within the solver's backward error of zero are zero; this keeps
  // sqrt() and x ln x from amplifying round-off on rank-deficient states.
  const double floor = tol::kEigenNoise * rho.dim();
  for (double& v : spec.eigenvalues) {
    if (std::abs(v) <= floor) v = 0.0;
  }
  return spec;
}

DensityMatrix validate_density(const ComplexMatrix& raw) {
  if (raw.rows() != raw.cols()) throw Error(ErrorKind::NotSquare, "density matrix must be square");
  if (raw.rows() < 2) throw Error(ErrorKind::InvalidArgument, "density matrix dimension must be >= 2");
  if (!raw.allFinite()) throw Error(ErrorKind::NonFinite, "density matrix has NaN or Inf entries");
  if (const double asym = hermiticity_residual(raw); asym > tol::kHermitianInput) {
    throw Error(ErrorKind::NotApproxHermitian, "asymmetry " + std::to_string(asym));
  }

  ComplexMatrix h = (raw + raw.adjoint()) * 0.5;
  SpectralDecomposition spec = spectral_decompose(h);
  const int d = static_cast<int>(h.rows());
  const double smallest = spec.eigenvalues(d - 1);
  if (smallest < -tol::kNegativeEigenvalue) {
    throw Error(ErrorKind::NegativeEigenvalue, "smallest eigenvalue " + std::to_string(smallest));
  }
  const double trace = h.trace().real();
  if (std::abs(trace - 1.0) > tol::kTraceInput) {
    throw Error(ErrorKind::TraceFarFromOne, "trace " + std::to_string(trace));
  }

  if (smallest < 0.0) {
    spec.eigenvalues = spec.eigenvalues.cwiseMax(0.0);
    h = spec.reconstruct();
    h = (h + h.adjoint()) * 0.5;
  }
  for (int i = 0; i < d; ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  h /= h.trace().real();
  return DensityMatrix(std::move(h));
}

ComplexMatrix matrix_sqrt(const DensityMatrix& rho) {
  SpectralDecomposition spec = spectral_decompose(rho);
  spec.eigenvalues = spec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  ComplexMatrix s = spec.reconstruct();
  return (s + s.adjoint()) * 0.5;
}

double purity(const DensityMatrix& rho) {
  // tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

ComplexMatrix flip_operator(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "flip operator needs d >= 2");
  const int n = d * d;
  ComplexMatrix f = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) f(i * d + j, j * d + i) = 1.0;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Named states and bases

namespace {

void require_dim(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 2, got " + std::to_string(d));
}

}  // namespace

DensityMatrix maximally_mixed_state(int d) {
  require_dim(d);
  return validate_density(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix maximally_coherent_state(int d) {
  require_dim(d);
  return validate_density(ComplexMatrix::Constant(d, d, Complex(1.0 / d, 0.0)));
}

DensityMatrix diagonal_state(std::span<const double> probabilities) {
  const auto d = static_cast<Eigen::Index>(probabilities.size());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = probabilities[static_cast<std::size_t>(i)];
  return validate_density(m);
}

DensityMatrix pure_state(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero state vector");
  const ComplexVector v = psi / norm;
  return validate_density(v * v.adjoint());
}

DensityMatrix state_from_spectrum(std::span<const double> probabilities, const ComplexMatrix& eigenvectors) {
  const auto d = static_cast<Eigen::Index>(probabilities.size());
  if (eigenvectors.rows() != d || eigenvectors.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch, "eigenvector matrix does not match spectrum length");
  }
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    m += probabilities[static_cast<std::size_t>(k)] * (eigenvectors.col(k) * eigenvectors.col(k).adjoint());
  }
  return validate_density(m);
}

MeasurementBasis fourier_basis(int d) {
  require_dim(d);
  ComplexMatrix f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      // Reduce jk mod d first so large d keeps full phase accuracy.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / d;
      f(j, k) = std::polar(scale, angle);
    }
  }
  return MeasurementBasis(std::move(f));
}

MeasurementBasis haar_unitary(int d, RngStream& rng) {
  require_dim(d);
  ComplexMatrix z(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double re = rng.standard_normal();
      const double im = rng.standard_normal();
      z(i, j) = Complex(re, im) * std::numbers::sqrt2 * 0.5;
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix& packed = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const Complex r = packed(k, k);
    const double a = std::abs(r);
    q.col(k) *= (a > 0.0) ? r / a : Complex(1.0, 0.0);
  }
  return MeasurementBasis(std::move(q));
}

// ---------------------------------------------------------------------------
// Random qudit construction

std::vector<double> probabilities_from_uniforms(std::span<const double> uniforms) {
  if (uniforms.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two uniforms");
  std::vector<double> q(uniforms.size());
  double running = 1.0;
  for (std::size_t k = 0; k < uniforms.size(); ++k) {
    if (!(uniforms[k] > 0.0 && uniforms[k] <= 1.0)) {
      throw Error(ErrorKind::DegenerateDraw, "uniform draw outside (0, 1]");
    }
    running *= uniforms[k];
    if (running == 0.0) throw Error(ErrorKind::DegenerateDraw, "q_k underflowed to zero");
    q[k] = running;
  }
  double total = 0.0;
  for (double v : q) total += v;
  for (double& v : q) v /= total;
  return q;
}

std::vector<double> random_probabilities(int d, RngStream& rng) {
  require_dim(d);
  std::vector<double> u(static_cast<std::size_t>(d));
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (double& v : u) v = rng.uniform_open01();
    try {
      return probabilities_from_uniforms(u);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateDraw) throw;
    }
  }
  throw Error(ErrorKind::DegenerateDraw, "100 consecutive degenerate probability draws");
}

ComplexMatrix hermitian_from_real(const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols()) throw Error(ErrorKind::NotSquare, "real seed matrix must be square");
  const Eigen::Index d = r.rows();
  ComplexMatrix h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    h(i, i) = Complex(r(i, i), 0.0);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      h(i, j) = Complex(r(i, j), r(j, i));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

ComplexMatrix random_hermitian(int d, RngStream& rng) {
  require_dim(d);
  Eigen::MatrixXd r(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) r(i, j) = rng.uniform(-1.0, 1.0);
  }
  return hermitian_from_real(r);
}

DensityMatrix random_qudit_state(int d, RngStream& rng) {
  const std::vector<double> p = random_probabilities(d, rng);
  const SpectralDecomposition frame = spectral_decompose(random_hermitian(d, rng));
  return state_from_spectrum(p, frame.eigenvectors);
}

}  // namespace coherelab
