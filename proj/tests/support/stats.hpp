#pragma once

// Test-only statistics helpers: Anderson-Darling normality check and
// entrywise Monte Carlo covariance comparison. Independent of the library's
// implementation paths so they can serve as oracles.

#include "onebit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace onebit::test {

// Anderson-Darling A*^2 for normality with estimated mean and variance
// (case 3), with the small-sample correction of D'Agostino & Stephens.
inline double anderson_darling_stat(std::vector<double> x) {
  const std::size_t n = x.size();
  if (n < 8) throw std::invalid_argument("anderson_darling_stat: n too small");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  const double sd = std::sqrt(var);

  std::sort(x.begin(), x.end());
  auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };

  double a2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = (x[i] - mean) / sd;
    const double zr = (x[n - 1 - i] - mean) / sd;
    double p1 = std::clamp(phi(zi), 1e-300, 1.0 - 1e-16);
    double p2 = std::clamp(phi(zr), 1e-300, 1.0 - 1e-16);
    a2 += (2.0 * static_cast<double>(i) + 1.0) *
          (std::log(p1) + std::log1p(-p2));
  }
  a2 = -static_cast<double>(n) - a2 / static_cast<double>(n);
  const double nd = static_cast<double>(n);
  return a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));
}

// p-value for the corrected statistic (D'Agostino & Stephens, Table 4.9).
inline double anderson_darling_pvalue(double a2_star) {
  if (a2_star >= 0.6)
    return std::exp(1.2937 - 5.709 * a2_star + 0.0186 * a2_star * a2_star);
  if (a2_star > 0.34)
    return std::exp(0.9177 - 4.279 * a2_star - 1.38 * a2_star * a2_star);
  if (a2_star > 0.2)
    return 1.0 -
           std::exp(-8.318 + 42.796 * a2_star - 59.938 * a2_star * a2_star);
  return 1.0 -
         std::exp(-13.436 + 101.14 * a2_star - 223.73 * a2_star * a2_star);
}

// Accumulates E[v v^H] from sample vectors along with the entrywise spread
// needed to judge a closed-form covariance against the Monte Carlo mean.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(Eigen::Index dim)
      : n_(0),
        sum_(ComplexMatrix::Zero(dim, dim)),
        sum_sq_re_(RealMatrix::Zero(dim, dim)),
        sum_sq_im_(RealMatrix::Zero(dim, dim)) {}

  void add(const ComplexVector& v) {
    const ComplexMatrix outer = v * v.adjoint();
    sum_ += outer;
    sum_sq_re_ += outer.real().cwiseAbs2();
    sum_sq_im_ += outer.imag().cwiseAbs2();
    ++n_;
  }

  void add_columns(const ComplexMatrix& batch) {
    for (Eigen::Index j = 0; j < batch.cols(); ++j) add(batch.col(j));
  }

  long count() const { return n_; }
  ComplexMatrix mean() const { return sum_ / static_cast<double>(n_); }

  // Standard error of the mean, per entry and rail.
  RealMatrix stderr_re() const {
    const double n = static_cast<double>(n_);
    RealMatrix mean_re = sum_.real() / n;
    RealMatrix var = (sum_sq_re_ / n - mean_re.cwiseAbs2()).cwiseMax(0.0);
    return (var / n).cwiseSqrt();
  }
  RealMatrix stderr_im() const {
    const double n = static_cast<double>(n_);
    RealMatrix mean_im = sum_.imag() / n;
    RealMatrix var = (sum_sq_im_ / n - mean_im.cwiseAbs2()).cwiseMax(0.0);
    return (var / n).cwiseSqrt();
  }

  // Largest deviation from `reference` in units of the entrywise standard
  // error (entries whose stderr is ~0 must match to `abs_floor`).
  double max_sigma_deviation(const ComplexMatrix& reference,
                             double abs_floor = 1e-9) const {
    const ComplexMatrix m = mean();
    const RealMatrix se_re = stderr_re();
    const RealMatrix se_im = stderr_im();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double dre = std::abs(m(i, j).real() - reference(i, j).real());
        const double dim = std::abs(m(i, j).imag() - reference(i, j).imag());
        worst = std::max(worst, dre / std::max(se_re(i, j), abs_floor));
        worst = std::max(worst, dim / std::max(se_im(i, j), abs_floor));
      }
    }
    return worst;
  }

 private:
  long n_;
  ComplexMatrix sum_;
  RealMatrix sum_sq_re_;
  RealMatrix sum_sq_im_;
};

inline double min_eigenvalue(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  return es.eigenvalues().minCoeff();
}

}  // namespace onebit::test
