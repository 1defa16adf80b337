#include "onebit/numerics.hpp"

#include "support/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace onebit;

namespace {

ComplexMatrix random_complex(RngStream& rng, Eigen::Index rows,
                             Eigen::Index cols) {
  return sample_complex_gaussian_matrix(rng, rows, cols);
}

double reconstruction_error(const ComplexMatrix& a, const SvdResult& dec) {
  const ComplexMatrix rebuilt =
      dec.u * dec.singular_values.asDiagonal() * dec.v.adjoint();
  return (a - rebuilt).norm() / a.norm();
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("svd of the identity") {
  const SvdResult dec = svd(ComplexMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i)
    CHECK(dec.singular_values(i) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd of a complex diagonal matrix") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = {3.0, 0.0};
  a(1, 1) = {0.0, 2.0};
  const SvdResult dec = svd(a);
  CHECK(dec.singular_values(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(dec.singular_values(1) == doctest::Approx(2.0).epsilon(1e-12));
  // Right singular vectors are the coordinate vectors up to phase.
  CHECK(std::abs(dec.v(0, 0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(dec.v(1, 1)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(dec.v(1, 0)) < 1e-10);
  CHECK(std::abs(dec.v(0, 1)) < 1e-10);
}

TEST_CASE("svd reconstructs a random 8x6 matrix") {
  RngStream rng(42, 1);
  const ComplexMatrix a = random_complex(rng, 8, 6);
  CHECK(reconstruction_error(a, svd(a)) < 1e-8);
}

TEST_CASE("svd reconstruction and orthonormality up to 64x64") {
  RngStream rng(7, 2);
  for (auto [rows, cols] : {std::pair{5, 3}, {3, 5}, {16, 16}, {64, 64},
                            {64, 32}, {31, 64}}) {
    const ComplexMatrix a = random_complex(rng, rows, cols);
    const SvdResult dec = svd(a);
    CHECK(reconstruction_error(a, dec) < 1e-8);
    const Eigen::Index r = std::min(rows, cols);
    CHECK((dec.u.adjoint() * dec.u - ComplexMatrix::Identity(r, r)).norm() <
          1e-8);
    CHECK((dec.v.adjoint() * dec.v - ComplexMatrix::Identity(r, r)).norm() <
          1e-8);
    for (Eigen::Index i = 0; i + 1 < r; ++i)
      CHECK(dec.singular_values(i) >= dec.singular_values(i + 1));
  }
}

TEST_CASE("svd rejects non-finite input") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  CHECK_THROWS_AS((void)svd(a), std::invalid_argument);
}

TEST_CASE("hermitian_solve identity and scalar cases") {
  RngStream rng(3, 3);
  const ComplexMatrix b = random_complex(rng, 4, 2);
  CHECK((hermitian_solve(ComplexMatrix::Identity(4, 4), b) - b).norm() <
        1e-12);

  const ComplexMatrix half =
      hermitian_solve(2.0 * ComplexMatrix::Identity(4, 4),
                      ComplexMatrix::Identity(4, 4));
  CHECK((half - 0.5 * ComplexMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("hermitian_solve residual on random PSD systems") {
  RngStream rng(5, 4);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 6 + 5 * trial;
    const ComplexMatrix m = random_complex(rng, n, n);
    const ComplexMatrix a =
        hermitianized(m * m.adjoint() + ComplexMatrix::Identity(n, n));
    const ComplexMatrix b = random_complex(rng, n, 3);
    const ComplexMatrix x = hermitian_solve(a, b);
    CHECK((a * x - b).norm() / b.norm() < 1e-8);
    // A \ A = I
    CHECK((hermitian_solve(a, a) - ComplexMatrix::Identity(n, n)).norm() <
          1e-8 * a.norm());
  }
}

TEST_CASE("hermitian_solve names the offending matrix when singular") {
  ComplexMatrix a = ComplexMatrix::Identity(3, 3);
  a(2, 2) = 1e-14;  // condition ~ 1e14
  const ComplexMatrix b = ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_WITH_AS((void)hermitian_solve(a, b, "C_r_tilde"),
                       doctest::Contains("C_r_tilde"), std::runtime_error);
  // Indefinite input is rejected too.
  ComplexMatrix indef = ComplexMatrix::Identity(2, 2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS((void)hermitian_solve(indef, b.topLeftCorner(2, 2)),
                  std::runtime_error);
}

TEST_CASE("arcsine map of the identity") {
  const ComplexMatrix out = elementwise_arcsine_map(ComplexMatrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) {
    CHECK(out(i, i).real() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(out(i, i).imag() == 0.0);
  }
  CHECK((out - (std::numbers::pi / 2) * ComplexMatrix::Identity(4, 4)).norm() <
        1e-14);
}

TEST_CASE("arcsine map closed-form off-diagonals") {
  ComplexMatrix c(2, 2);
  c << Complex{1.0, 0.0}, Complex{0.5, 0.0}, Complex{0.5, 0.0},
      Complex{1.0, 0.0};
  ComplexMatrix out = elementwise_arcsine_map(c);
  CHECK(out(0, 1).real() == doctest::Approx(std::numbers::pi / 6).epsilon(1e-14));

  c(0, 1) = {0.3, 0.4};
  c(1, 0) = {0.3, -0.4};
  out = elementwise_arcsine_map(c);
  CHECK(out(0, 1).real() == doctest::Approx(std::asin(0.3)).epsilon(1e-14));
  CHECK(out(0, 1).imag() == doctest::Approx(std::asin(0.4)).epsilon(1e-14));
}

TEST_CASE("arcsine map output stays Hermitian on random PSD inputs") {
  RngStream rng(11, 5);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + trial;
    const ComplexMatrix m = random_complex(rng, n, n);
    ComplexMatrix c =
        hermitianized(m * m.adjoint() + 0.1 * ComplexMatrix::Identity(n, n));
    const ComplexMatrix out = elementwise_arcsine_map(c);
    CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("arcsine map domain errors and boundary clamping") {
  ComplexMatrix bad_diag = ComplexMatrix::Identity(2, 2);
  bad_diag(1, 1) = 0.0;
  CHECK_THROWS_AS((void)elementwise_arcsine_map(bad_diag), std::domain_error);

  ComplexMatrix non_psd(2, 2);
  non_psd << Complex{1.0, 0.0}, Complex{1.1, 0.0}, Complex{1.1, 0.0},
      Complex{1.0, 0.0};
  CHECK_THROWS_AS((void)elementwise_arcsine_map(non_psd), std::domain_error);

  // Within the clamping tolerance the argument is snapped to +-1.
  ComplexMatrix near_one(2, 2);
  near_one << Complex{1.0, 0.0}, Complex{1.0 + 5e-10, 0.0},
      Complex{1.0 + 5e-10, 0.0}, Complex{1.0, 0.0};
  const ComplexMatrix out = elementwise_arcsine_map(near_one);
  CHECK(out(0, 1).real() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("complex gaussian sampling: mean and variance oracles") {
  RngStream rng(1234, 6);
  Eigen::Vector2cd mean = Eigen::Vector2cd::Zero();
  double power = 0.0;
  const long draws = 1000000;
  for (long i = 0; i < draws; ++i) {
    const ComplexVector z = sample_complex_gaussian(rng, 2);
    mean += z;
    power += std::norm(z(0));
  }
  mean /= static_cast<double>(draws);
  CHECK(std::abs(mean(0)) < 5e-3);
  CHECK(std::abs(mean(1)) < 5e-3);
  CHECK(power / static_cast<double>(draws) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("complex gaussian with covariance") {
  ComplexMatrix cov(2, 2);
  cov << Complex{1.0, 0.0}, Complex{0.3, 0.4}, Complex{0.3, -0.4},
      Complex{1.0, 0.0};
  RngStream rng(99, 7);
  test::CovarianceAccumulator acc(2);
  for (int i = 0; i < 200000; ++i)
    acc.add(sample_complex_gaussian(rng, cov));
  const ComplexMatrix emp = acc.mean();
  CHECK((emp - cov).cwiseAbs().maxCoeff() < 1e-2);

  // Zero covariance degenerates to the zero vector.
  RngStream rng2(1, 8);
  CHECK(sample_complex_gaussian(rng2, ComplexMatrix::Zero(3, 3)).norm() == 0.0);

  ComplexMatrix indefinite(2, 2);
  indefinite << Complex{1.0, 0.0}, Complex{2.0, 0.0}, Complex{2.0, 0.0},
      Complex{1.0, 0.0};
  CHECK_THROWS_AS((void)sample_complex_gaussian(rng2, indefinite),
                  std::domain_error);
  ComplexMatrix non_hermitian(2, 2);
  non_hermitian << Complex{1.0, 0.0}, Complex{0.5, 0.0}, Complex{0.1, 0.0},
      Complex{1.0, 0.0};
  CHECK_THROWS_AS((void)sample_complex_gaussian(rng2, non_hermitian),
                  std::domain_error);
}

TEST_CASE("rng streams: reproducibility and independence") {
  RngStream a(555, 77);
  RngStream b(555, 77);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_gaussian() == b.next_gaussian());
    CHECK(a.next_complex_gaussian() == b.next_complex_gaussian());
  }

  RngStream c(555, 78);
  int agree = 0;
  RngStream a2(555, 77);
  for (int i = 0; i < 64; ++i) agree += a2.next_u64() == c.next_u64();
  CHECK(agree == 0);
}

TEST_CASE("stable_hash is order-sensitive and tag-sensitive") {
  CHECK(stable_hash("channel", 1, 2) != stable_hash("channel", 2, 1));
  CHECK(stable_hash("channel", 1, 2) != stable_hash("symbols", 1, 2));
  CHECK(stable_hash("noise", 0, 0) == stable_hash("noise", 0, 0));
}

TEST_SUITE_END();
