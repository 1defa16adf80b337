#include "onebit/numerics.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace onebit {

namespace {

constexpr double kTwoPow53Inv = 0x1.0p-53;

}  // namespace

std::uint64_t stable_hash_bytes(const void* data, std::size_t len,
                                std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t stable_hash(std::string_view tag, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = stable_hash_bytes(tag.data(), tag.size());
  std::uint64_t words[3] = {a, b, c};
  unsigned char buf[24];
  for (int w = 0; w < 3; ++w)
    for (int i = 0; i < 8; ++i)
      buf[8 * w + i] = static_cast<unsigned char>(words[w] >> (8 * i));
  return stable_hash_bytes(buf, sizeof(buf), h);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  gen_.seed(seq);
}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double RngStream::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

double RngStream::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = r * std::sin(theta);
  has_cached_gaussian_ = true;
  return r * std::cos(theta);
}

Complex RngStream::next_complex_gaussian() {
  const double u1 =
      static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = next_double();
  // |z|^2 ~ Exp(1), phase uniform: CN(0, 1).
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double rtol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = max_abs(a);
  const double drift = (a - a.adjoint()).cwiseAbs().maxCoeff();
  return drift <= rtol * std::max(scale, 1e-300);
}

ComplexMatrix hermitianized(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

SvdResult svd(const ComplexMatrix& a) {
  if (a.size() == 0)
    throw std::invalid_argument("svd: empty matrix");
  if (!a.allFinite())
    throw std::invalid_argument("svd: input has non-finite entries");
  Eigen::BDCSVD<ComplexMatrix> dec(a,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw std::runtime_error(
        "svd: decomposition did not converge within the backend sweep cap");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b,
                              const char* label) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(std::string("hermitian_solve: matrix '") +
                                label + "' is not square");
  if (a.rows() != b.rows())
    throw std::invalid_argument(
        std::string("hermitian_solve: dimension mismatch between '") + label +
        "' and right-hand side");
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(std::string("hermitian_solve: matrix '") + label +
                             "' is not positive definite");
  const double rcond = llt.rcond();
  if (!(rcond > 1.0 / kConditionLimit)) {
    std::ostringstream msg;
    msg << "hermitian_solve: matrix '" << label
        << "' is numerically singular (estimated condition number "
        << (rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity())
        << " exceeds " << kConditionLimit << ")";
    throw std::runtime_error(msg.str());
  }
  return llt.solve(b);
}

ComplexMatrix elementwise_arcsine_map(const ComplexMatrix& c) {
  const Eigen::Index n = c.rows();
  if (n != c.cols())
    throw std::invalid_argument("elementwise_arcsine_map: matrix not square");
  if (!is_hermitian(c))
    throw std::domain_error("elementwise_arcsine_map: input is not Hermitian");

  RealVector inv_sqrt_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = c(i, i).real();
    if (!(d > 0.0))
      throw std::domain_error(
          "elementwise_arcsine_map: non-positive diagonal entry at index " +
          std::to_string(i));
    inv_sqrt_diag(i) = 1.0 / std::sqrt(d);
  }

  auto normalized_asin = [](double v) {
    if (v > 1.0 || v < -1.0) {
      if (std::abs(v) > 1.0 + kArcsineClampTolerance)
        throw std::domain_error(
            "elementwise_arcsine_map: normalized magnitude " +
            std::to_string(std::abs(v)) +
            " exceeds 1 beyond the clamping tolerance (non-PSD input)");
      v = v > 0.0 ? 1.0 : -1.0;
    }
    return std::asin(v);
  };

  ComplexMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) {
        // The normalized diagonal is 1 by definition; computing d/(sqrt(d))^2
        // in floating point can land just below 1 where asin loses ~1e-8.
        out(i, j) = {std::asin(1.0),
                     normalized_asin(c(i, i).imag() / c(i, i).real())};
        continue;
      }
      const double s = inv_sqrt_diag(i) * inv_sqrt_diag(j);
      out(i, j) = {normalized_asin(c(i, j).real() * s),
                   normalized_asin(c(i, j).imag() * s)};
    }
  }
  return out;
}

ComplexVector sample_complex_gaussian(RngStream& rng, Eigen::Index length) {
  if (length <= 0)
    throw std::invalid_argument("sample_complex_gaussian: length must be > 0");
  ComplexVector z(length);
  for (Eigen::Index i = 0; i < length; ++i) z(i) = rng.next_complex_gaussian();
  return z;
}

ComplexVector sample_complex_gaussian(RngStream& rng,
                                      const ComplexMatrix& covariance) {
  if (covariance.rows() != covariance.cols())
    throw std::invalid_argument("sample_complex_gaussian: covariance not square");
  if (!is_hermitian(covariance))
    throw std::domain_error("sample_complex_gaussian: covariance not Hermitian");

  const Eigen::Index n = covariance.rows();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(covariance);
  if (es.info() != Eigen::Success)
    throw std::runtime_error(
        "sample_complex_gaussian: eigendecomposition of covariance failed");

  RealVector lambda = es.eigenvalues();
  const double lmax = std::max(lambda.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda(i) < -1e-9 * std::max(lmax, 1.0))
      throw std::domain_error("sample_complex_gaussian: covariance not PSD");
    lambda(i) = std::max(lambda(i), 0.0);
  }

  const ComplexVector w = sample_complex_gaussian(rng, n);
  return es.eigenvectors() *
         (lambda.cwiseSqrt().cast<Complex>().asDiagonal() * w);
}

ComplexMatrix sample_complex_gaussian_matrix(RngStream& rng,
                                             Eigen::Index length,
                                             Eigen::Index cols) {
  if (length <= 0 || cols <= 0)
    throw std::invalid_argument(
        "sample_complex_gaussian_matrix: dimensions must be > 0");
  ComplexMatrix z(length, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < length; ++i)
      z(i, j) = rng.next_complex_gaussian();
  return z;
}

}  // namespace onebit
