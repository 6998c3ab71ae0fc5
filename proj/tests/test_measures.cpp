#include <algorithm>
#include <cmath>
#include <numeric>

#include "coherelab/measures.hpp"
#include "coherelab/qstate.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace coherelab;

namespace {

const std::vector<double> kSeventyThirty{0.7, 0.3};
const std::vector<double> kSixtyFour{0.64, 0.36};

MeasurementBasis eigenbasis(const DensityMatrix& rho) { return MeasurementBasis(spectral_decompose(rho).eigenvectors); }

std::vector<double> random_spectrum(int d, RngStream& rng) {
  std::vector<double> p(static_cast<std::size_t>(d));
  for (double& v : p) v = rng.uniform_open01();
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

TEST_CASE("CoherenceKind") {
  CHECK(CoherenceKind::lp_norm(1.0).name() == "l1");
  CHECK(CoherenceKind::lp_norm(2.0).name() == "l2");
  CHECK(CoherenceKind::relative_entropy().name() == "relative_entropy");
  CHECK(CoherenceKind::skew_information().name() == "skew_information");
  CHECK_THROWS_AS(CoherenceKind::lp_norm(0.5), Error);
  CHECK_THROWS_AS(CoherenceKind::lp_norm(INFINITY), Error);
  try {
    (void)CoherenceKind::lp_norm(NAN);
    FAIL("NaN p accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidP);
  }
}

TEST_CASE("Spectrum invariants") {
  const Spectrum s(std::vector<double>{0.2, 0.5, 0.3});
  CHECK(s.values() == std::vector<double>{0.5, 0.3, 0.2});
  CHECK(Spectrum(std::vector<double>{1.0, -1e-13}).values()[1] == 0.0);
  CHECK_THROWS_AS(Spectrum(std::vector<double>{1.1, -0.1}), Error);
  CHECK_THROWS_AS(Spectrum(std::vector<double>{0.5, 0.4}), Error);
}

TEST_CASE("dephase") {
  const DensityMatrix diag = diagonal_state(kSeventyThirty);
  CHECK(max_abs(dephase(diag, MeasurementBasis::computational(2)).matrix() - diag.matrix()) < 1e-15);
  CHECK(max_abs(dephase(maximally_coherent_state(2), MeasurementBasis::computational(2)).matrix() -
                ComplexMatrix::Identity(2, 2) / 2.0) < 1e-15);
  RngStream rng(41, 0);
  const DensityMatrix rho = random_qudit_state(4, rng);
  CHECK(max_abs(dephase(rho, eigenbasis(rho)).matrix() - rho.matrix()) < 1e-12);
  CHECK_THROWS_AS(dephase(rho, MeasurementBasis::computational(3)), Error);
}

TEST_CASE("l_p coherence") {
  const MeasurementBasis comp2 = MeasurementBasis::computational(2);
  const DensityMatrix psi2 = maximally_coherent_state(2);
  const double oracle_l2 = oracle::offdiag_norm(psi2.matrix(), 2.0);
  CHECK(oracle_l2 == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(std::abs(coherence_lp(psi2, comp2, 2.0) - oracle_l2) < 1e-15);

  for (int d = 2; d <= 8; ++d) {
    const DensityMatrix psi = maximally_coherent_state(d);
    const MeasurementBasis comp = MeasurementBasis::computational(d);
    CHECK(coherence_lp(psi, comp, 1.0) == doctest::Approx(d - 1.0).epsilon(1e-14));
    // The definition carries the outer 1/p power.
    for (double p : {1.5, 2.0, 3.0}) {
      const double expected = std::pow((d - 1.0) / std::pow(d, p - 1.0), 1.0 / p);
      CHECK(coherence_lp(psi, comp, p) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  for (std::uint64_t k = 0; k < 50; ++k) {
    RngStream rng(42, k);
    const int d = 2 + static_cast<int>(k % 6);
    const DensityMatrix rho = random_qudit_state(d, rng);
    const MeasurementBasis u = haar_unitary(d, rng);
    for (double p : {1.0, 2.0, 2.5}) {
      CHECK(coherence_lp(rho, eigenbasis(rho), p) < 1e-12);
      const ComplexMatrix r = u.unitary().adjoint() * rho.matrix() * u.unitary();
      CHECK(std::abs(coherence_lp(rho, u, p) - oracle::offdiag_norm(r, p)) < 1e-12);
    }
  }
}

TEST_CASE("relative entropy coherence") {
  for (int d = 2; d <= 8; ++d) {
    CHECK(coherence_relative_entropy(maximally_coherent_state(d), MeasurementBasis::computational(d)) ==
          doctest::Approx(std::log(d)).epsilon(1e-13));
  }
  const DensityMatrix rho = diagonal_state(kSeventyThirty);
  CHECK(coherence_relative_entropy(rho, MeasurementBasis::computational(2)) < 1e-15);
  const double oracle_value = std::log(2.0) - oracle::entropy_of(kSeventyThirty);
  CHECK(oracle_value == doctest::Approx(0.08229).epsilon(1e-4));
  CHECK(std::abs(coherence_relative_entropy(rho, fourier_basis(2)) - oracle_value) < 1e-14);
}

TEST_CASE("skew information coherence") {
  for (int d = 2; d <= 8; ++d) {
    CHECK(coherence_skew_information(maximally_coherent_state(d), MeasurementBasis::computational(d)) ==
          doctest::Approx(1.0 - 1.0 / d).epsilon(1e-13));
    RngStream rng(43, static_cast<std::uint64_t>(d));
    CHECK(std::abs(coherence_skew_information(maximally_mixed_state(d), haar_unitary(d, rng))) < 1e-14);
    const DensityMatrix rho = random_qudit_state(d, rng);
    CHECK(std::abs(coherence_skew_information(rho, eigenbasis(rho))) < 1e-12);
  }
  // Against -1/2 sum_i tr [sqrt(rho), P_i]^2 evaluated directly.
  RngStream rng(44, 0);
  const DensityMatrix rho = random_qudit_state(3, rng);
  const MeasurementBasis u = haar_unitary(3, rng);
  const ComplexMatrix root = matrix_sqrt(rho);
  double direct = 0.0;
  for (int i = 0; i < 3; ++i) {
    const ComplexMatrix proj = u.unitary().col(i) * u.unitary().col(i).adjoint();
    const ComplexMatrix comm = root * proj - proj * root;
    direct += -0.5 * (comm * comm).trace().real();
  }
  CHECK(std::abs(coherence_skew_information(rho, u) - direct) < 1e-13);
}

TEST_CASE("mixedness measures") {
  for (int d = 2; d <= 6; ++d) {
    CHECK(von_neumann_entropy(maximally_mixed_state(d)) == doctest::Approx(std::log(d)).epsilon(1e-14));
    CHECK(von_neumann_entropy(maximally_coherent_state(d)) == 0.0);
    CHECK(linear_entropy_mixedness(maximally_mixed_state(d)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(linear_entropy_mixedness(maximally_coherent_state(d))) < 1e-14);
    CHECK(geometric_mixedness(maximally_mixed_state(d)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(geometric_mixedness(maximally_coherent_state(d)) == doctest::Approx(1.0 / d).epsilon(1e-7));
  }
  const double s = oracle::entropy_of(kSeventyThirty);
  CHECK(s == doctest::Approx(0.610864).epsilon(1e-6));
  CHECK(std::abs(von_neumann_entropy(diagonal_state(kSeventyThirty)) - s) < 1e-15);
  CHECK(linear_entropy_mixedness(diagonal_state(kSeventyThirty)) == doctest::Approx(0.84).epsilon(1e-14));
  CHECK(geometric_mixedness(diagonal_state(kSixtyFour)) == doctest::Approx(0.98).epsilon(1e-14));
}

TEST_CASE("harmonic tail") {
  CHECK(harmonic_tail(2) == 0.5);
  CHECK(harmonic_tail(3) == doctest::Approx(5.0 / 6).epsilon(1e-15));
  CHECK(harmonic_tail(5) == doctest::Approx(77.0 / 60).epsilon(1e-15));
  CHECK_THROWS_AS(harmonic_tail(1), Error);
}

TEST_CASE("subentropy fixed values") {
  CHECK(subentropy(Spectrum(std::vector<double>{1.0, 0.0, 0.0})) == 0.0);
  const double extrapolated = oracle::subentropy_pair_extrapolated(0.5);
  CHECK(extrapolated == doctest::Approx(0.193147).epsilon(1e-6));
  CHECK(std::abs(extrapolated - (std::log(2.0) - 0.5)) < 1e-10);
  CHECK(std::abs(subentropy(Spectrum(std::vector<double>{0.5, 0.5})) - extrapolated) < 1e-10);
  for (int d = 2; d <= 16; ++d) {
    const Spectrum flat(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d));
    CHECK(std::abs(von_neumann_entropy(flat) - subentropy(flat) - harmonic_tail(d)) < 1e-12);
  }
}

TEST_CASE("subentropy matches the high-precision product formula") {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 600; ++k) {
    RngStream rng(45, k);
    const int d = 2 + static_cast<int>(k % 15);
    std::vector<double> p = random_spectrum(d, rng);
    switch (k % 4) {
      case 1:  // one exact tie
        p[1] = p[0];
        break;
      case 2:  // a near tie and a vanishing entry
        p[1] = p[0] * (1.0 + 1e-9);
        p[static_cast<std::size_t>(d - 1)] = 0.0;
        break;
      case 3:  // heavy spread
        for (double& v : p) v = std::pow(v, 6.0);
        break;
      default:
        break;
    }
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    const Spectrum spec(p);
    const double err = std::abs(subentropy(spec) - oracle::subentropy_product_formula(spec.values()));
    worst = std::max(worst, err);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("subentropy between zero and entropy") {
  for (std::uint64_t k = 0; k < 2000; ++k) {
    RngStream rng(46, k);
    const int d = 2 + static_cast<int>(k % 15);
    const Spectrum spec(random_probabilities(d, rng));
    const double q = subentropy(spec);
    CHECK(q >= 0.0);
    CHECK(q <= von_neumann_entropy(spec) + 1e-12);
  }
}

TEST_CASE("subentropy is Lipschitz across a degeneracy") {
  for (std::uint64_t k = 0; k < 50; ++k) {
    RngStream rng(47, k);
    const int d = 2 + static_cast<int>(k % 6);
    std::vector<double> p = random_spectrum(d, rng);
    p[1] = p[0];
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    const double confluent = subentropy(Spectrum(p));
    for (double eps = 1e-3; eps >= 1e-9; eps /= 10.0) {
      std::vector<double> q = p;
      q[0] += eps;
      for (double& v : q) v /= 1.0 + eps;
      CHECK(std::abs(subentropy(Spectrum(q)) - confluent) <= 10.0 * eps);
    }
  }
}

TEST_CASE("Durr predictability and visibility") {
  for (int d = 2; d <= 6; ++d) {
    const MeasurementBasis comp = MeasurementBasis::computational(d);
    CHECK(std::abs(durr_predictability_sq(maximally_coherent_state(d), comp)) < 1e-14);
    CHECK(durr_visibility_sq(maximally_coherent_state(d), comp) == doctest::Approx(1.0).epsilon(1e-13));
    RngStream rng(48, static_cast<std::uint64_t>(d));
    CHECK(std::abs(durr_predictability_sq(maximally_mixed_state(d), haar_unitary(d, rng))) < 1e-14);
  }
  const std::vector<double> pure{1.0, 0.0};
  CHECK(durr_predictability_sq(diagonal_state(pure), MeasurementBasis::computational(2)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  RngStream rng(48, 99);
  const DensityMatrix rho = random_qudit_state(4, rng);
  CHECK(durr_visibility_sq(rho, eigenbasis(rho)) < 1e-24);
}

TEST_CASE("basis-dependent inequalities and triality on random pairs") {
  for (std::uint64_t k = 0; k < 500; ++k) {
    RngStream rng(49, k);
    const int d = 2 + static_cast<int>(k % 7);
    const double dd = d;
    const DensityMatrix rho = random_qudit_state(d, rng);
    const MeasurementBasis u = haar_unitary(d, rng);
    const double l1 = coherence_lp(rho, u, 1.0);
    const double l2 = coherence_lp(rho, u, 2.0);
    const double ml = linear_entropy_mixedness(rho);
    CHECK(l1 <= std::sqrt(dd * (dd - 1.0)) * l2 + 1e-12);
    CHECK(coherence_relative_entropy(rho, u) + von_neumann_entropy(rho) <= std::log(dd) + 1e-10);
    CHECK(coherence_skew_information(rho, u) + geometric_mixedness(rho) <= 1.0 + 1e-10);
    CHECK(dd / (dd - 1.0) * l2 * l2 + ml <= 1.0 + 1e-10);
    CHECK(std::abs(durr_predictability_sq(rho, u) + durr_visibility_sq(rho, u) + ml - 1.0) < 1e-10);
  }
}

TEST_CASE("CoherenceEvaluator agrees with the free functions") {
  RngStream rng(50, 0);
  const DensityMatrix rho = random_qudit_state(5, rng);
  const MeasurementBasis u = haar_unitary(5, rng);
  for (const CoherenceKind kind : {CoherenceKind::lp_norm(1.0), CoherenceKind::lp_norm(2.0),
                                   CoherenceKind::relative_entropy(), CoherenceKind::skew_information()}) {
    const CoherenceEvaluator eval(rho, kind);
    CHECK(eval(u) == coherence(rho, u, kind));
  }
  CHECK_THROWS_AS((void)CoherenceEvaluator(rho, CoherenceKind::relative_entropy())(MeasurementBasis::computational(3)),
                  Error);
}
