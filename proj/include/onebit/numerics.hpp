#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

// Dense complex linear algebra and random sampling shared by all modules.
// Matrices are Eigen double-precision types; every function is a pure
// function of its arguments (plus the explicit RngStream), so values can be
// moved freely between threads.

namespace onebit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Hermitian systems with an estimated condition number above this limit are
/// rejected as numerically singular.
inline constexpr double kConditionLimit = 1e12;

/// Arcsine arguments may exceed [-1, 1] by at most this much before the
/// excursion is treated as a genuine domain violation.
inline constexpr double kArcsineClampTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Stable hashing (stream-id derivation must not depend on std::hash).

std::uint64_t stable_hash_bytes(const void* data, std::size_t len,
                                std::uint64_t h = 14695981039346656037ull);

/// FNV-1a over a role tag and up to three integer words. Used to derive RNG
/// stream ids from (experiment-id, realization-index, role).
std::uint64_t stable_hash(std::string_view tag, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

// ---------------------------------------------------------------------------
// Random streams.

/// Deterministic random stream keyed by (seed, stream_id).
///
/// Equal keys reproduce bitwise-identical sequences on every platform: the
/// generator is std::mt19937_64 (fully specified by the standard) and all
/// distributions are implemented here rather than via the
/// implementation-defined std:: distribution classes.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double next_double();

  /// Uniform on [lo, hi).
  double next_uniform(double lo, double hi);

  /// Standard normal N(0, 1) via Box-Muller; consumes two u64 per pair, one
  /// value is cached for the next call.
  double next_gaussian();

  /// Circularly-symmetric CN(0, 1); consumes exactly two u64 and does not
  /// touch the real-Gaussian cache.
  Complex next_complex_gaussian();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

// ---------------------------------------------------------------------------
// Matrix predicates and helpers.

/// Largest entry magnitude; 0 for an empty matrix.
double max_abs(const ComplexMatrix& a);

/// A == A^H entrywise within rtol relative to the max-magnitude entry.
bool is_hermitian(const ComplexMatrix& a, double rtol = 1e-10);

/// (A + A^H) / 2 — removes round-off drift from products that are Hermitian
/// by construction.
ComplexMatrix hermitianized(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Decompositions and solves.

struct SvdResult {
  ComplexMatrix u;             // thin left singular vectors
  RealVector singular_values;  // descending
  ComplexMatrix v;             // thin right singular vectors
};

/// Thin SVD, A = U * diag(s) * V^H, singular values sorted descending.
/// Throws std::runtime_error if the backend fails to converge within its
/// internal sweep cap.
SvdResult svd(const ComplexMatrix& a);

/// Solves A X = B for Hermitian positive definite A via Cholesky. `label`
/// names the matrix in error messages. Throws std::runtime_error when A is
/// not PD or its estimated condition number exceeds kConditionLimit.
ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b,
                              const char* label = "A");

/// Entrywise arcsine map of a Hermitian matrix with positive diagonal:
///   asin(D^-1/2 Re[C] D^-1/2) + j asin(D^-1/2 Im[C] D^-1/2),  D = Diag(C).
/// Normalized arguments are clamped into [-1, 1] when within
/// kArcsineClampTolerance of the boundary; larger excursions throw
/// std::domain_error (they signal a non-PSD input).
ComplexMatrix elementwise_arcsine_map(const ComplexMatrix& c);

// ---------------------------------------------------------------------------
// Gaussian sampling.

/// i.i.d. CN(0, 1) entries.
ComplexVector sample_complex_gaussian(RngStream& rng, Eigen::Index length);

/// CN(0, covariance); covariance must be Hermitian PSD (may be singular).
ComplexVector sample_complex_gaussian(RngStream& rng,
                                      const ComplexMatrix& covariance);

/// length x cols matrix of i.i.d. CN(0, 1) entries, filled column by column.
ComplexMatrix sample_complex_gaussian_matrix(RngStream& rng,
                                             Eigen::Index length,
                                             Eigen::Index cols);

}  // namespace onebit
