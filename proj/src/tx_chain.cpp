#include "onebit/tx_chain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace onebit {

namespace {

// sgn(0) = +1 on both rails; keeps the quantizer total and deterministic.
inline double sign_bit(double x) { return x < 0.0 ? -1.0 : 1.0; }

inline Complex quantize_entry(Complex b, double half_eta_sqrt) {
  return {half_eta_sqrt * sign_bit(b.real()),
          half_eta_sqrt * sign_bit(b.imag())};
}

}  // namespace

const char* to_string(QuantizerMode mode) {
  return mode == QuantizerMode::one_bit ? "one-bit" : "full-resolution";
}

LinkConfig LinkConfig::make(int n_tx, int m_rx, int k_streams, double rho,
                            QuantizerMode dac_mode, QuantizerMode adc_mode) {
  if (n_tx < 1 || m_rx < 1)
    throw std::invalid_argument("LinkConfig: antenna counts must be >= 1");
  if (k_streams < 1 || k_streams > std::min(n_tx, m_rx))
    throw std::invalid_argument(
        "LinkConfig: stream count must satisfy 1 <= K <= min(N, M)");
  if (!(rho > 0.0))
    throw std::invalid_argument("LinkConfig: rho must be > 0");

  LinkConfig cfg;
  cfg.n_tx = n_tx;
  cfg.m_rx = m_rx;
  cfg.k_streams = k_streams;
  cfg.rho = rho;
  cfg.eta_tx = 1.0 / static_cast<double>(n_tx);
  cfg.eta_rx = rho + 1.0;
  cfg.dac_mode = dac_mode;
  cfg.adc_mode = adc_mode;
  return cfg;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ComplexVector quantize_1bit(const ComplexVector& b, double eta) {
  if (!(eta > 0.0))
    throw std::invalid_argument("quantize_1bit: eta must be > 0");
  const double s = std::sqrt(eta / 2.0);
  ComplexVector t(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) t(i) = quantize_entry(b(i), s);
  return t;
}

ComplexMatrix quantize_1bit(const ComplexMatrix& b, double eta) {
  if (!(eta > 0.0))
    throw std::invalid_argument("quantize_1bit: eta must be > 0");
  const double s = std::sqrt(eta / 2.0);
  ComplexMatrix t(b.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      t(i, j) = quantize_entry(b(i, j), s);
  return t;
}

Precoder precoder_from_singular_vectors(const ComplexMatrix& v_cols,
                                        const RealVector& singular_values,
                                        int k_streams,
                                        QuantizerMode dac_mode) {
  if (k_streams < 1 || k_streams > v_cols.cols())
    throw std::invalid_argument(
        "precoder_from_singular_vectors: invalid stream count");

  ComplexMatrix w = v_cols.leftCols(k_streams);

  // Fix each column's free phase so the largest-magnitude entry is real
  // positive; ties resolved toward the lowest index. Keeps regression
  // outputs stable across SVD backends.
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      const double mag = std::abs(w(r, c));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (best > 0.0) w.col(c) *= std::conj(w(pivot, c)) / best;
  }

  if (dac_mode == QuantizerMode::full_resolution)
    w *= 1.0 / std::sqrt(static_cast<double>(k_streams));

  Precoder p;
  p.w = std::move(w);
  p.c_x = hermitianized(p.w * p.w.adjoint());
  if (singular_values.size() >= k_streams) {
    const double smax = singular_values(0);
    p.rank_deficient = singular_values(k_streams - 1) <= 1e-12 * smax;
  }
  return p;
}

Precoder build_svd_precoder(const ComplexMatrix& h, int k_streams,
                            QuantizerMode dac_mode) {
  if (k_streams < 1 || k_streams > std::min(h.rows(), h.cols()))
    throw std::invalid_argument(
        "build_svd_precoder: need 1 <= K <= min(M, N)");
  const SvdResult dec = svd(h);
  return precoder_from_singular_vectors(dec.v, dec.singular_values, k_streams,
                                        dac_mode);
}

TxLinearization tx_linearize(const Precoder& precoder,
                             const LinkConfig& config) {
  if (precoder.c_x.rows() != config.n_tx)
    throw std::invalid_argument("tx_linearize: precoder/config size mismatch");

  TxLinearization lin;
  if (config.dac_mode == QuantizerMode::full_resolution) {
    // t = x: the Bussgang step is the identity.
    lin.g_tx = RealVector::Ones(config.n_tx);
    lin.c_t = precoder.c_x;
    return lin;
  }

  const Eigen::Index n = precoder.c_x.rows();
  RealVector diag(n);
  double dmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    diag(i) = precoder.c_x(i, i).real();
    dmax = std::max(dmax, diag(i));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (diag(i) <= 1e-14 * dmax)
      throw std::domain_error(
          "tx_linearize: degenerate antenna " + std::to_string(i) +
          " (zero input power; precoder feeds this antenna nothing)");
  }

  const double scale = std::sqrt(2.0 * config.eta_tx / std::numbers::pi);
  lin.g_tx = scale * diag.cwiseSqrt().cwiseInverse();
  lin.c_t = (2.0 / std::numbers::pi) * config.eta_tx *
            elementwise_arcsine_map(precoder.c_x);
  return lin;
}

ComplexMatrix tx_distortion_cov(const TxLinearization& lin,
                                const Precoder& precoder) {
  if (lin.c_t.rows() != precoder.c_x.rows())
    throw std::invalid_argument("tx_distortion_cov: size mismatch");
  return hermitianized(lin.c_t - lin.g_tx.cast<Complex>().asDiagonal() *
                                     precoder.c_x *
                                     lin.g_tx.cast<Complex>().asDiagonal());
}

}  // namespace onebit
