#pragma once

#include "onebit/numerics.hpp"

// Transmitter side: precoder construction, 1-bit DAC quantization, and the
// transmitter Bussgang linearization (closed-form gain and arcsine-law
// output covariance).

namespace onebit {

enum class QuantizerMode {
  one_bit,
  full_resolution,
};

const char* to_string(QuantizerMode mode);

/// Scalar parameters of one link instance. Use make() so the derived scaling
/// factors (eta_tx = 1/N, eta_rx = rho + 1) and the stream-count constraint
/// are enforced at construction.
struct LinkConfig {
  int n_tx = 0;      // N
  int m_rx = 0;      // M
  int k_streams = 0; // K <= min(N, M)
  double rho = 0.0;  // transmit SNR, linear
  double eta_tx = 0.0;
  double eta_rx = 0.0;
  QuantizerMode dac_mode = QuantizerMode::one_bit;
  // ADC bypass is a diagnostic mode only; headline experiments always run
  // 1-bit ADCs.
  QuantizerMode adc_mode = QuantizerMode::one_bit;

  static LinkConfig make(int n_tx, int m_rx, int k_streams, double rho,
                         QuantizerMode dac_mode = QuantizerMode::one_bit,
                         QuantizerMode adc_mode = QuantizerMode::one_bit);
};

double db_to_linear(double db);

/// Linear precoder W (N x K) and its input covariance C_x = W W^H.
struct Precoder {
  ComplexMatrix w;
  ComplexMatrix c_x;
  // Set when the requested stream count exceeds the numerical rank of H
  // (trailing singular values ~ 0).
  bool rank_deficient = false;
};

/// Transmitter Bussgang linearization t = G_tx x + d_tx. The gain is
/// diagonal with positive real entries and is stored as its diagonal.
struct TxLinearization {
  RealVector g_tx;    // diagonal of G_TX
  ComplexMatrix c_t;  // E[t t^H]

  ComplexMatrix g_tx_matrix() const {
    return ComplexMatrix(g_tx.cast<Complex>().asDiagonal());
  }
};

/// Per-entry 1-bit quantizer: sqrt(eta/2) (sgn(Re b) + j sgn(Im b)) with
/// sgn(0) = +1. Every output entry has squared magnitude exactly eta.
ComplexVector quantize_1bit(const ComplexVector& b, double eta);
/// Column-wise batch variant.
ComplexMatrix quantize_1bit(const ComplexMatrix& b, double eta);

/// W = the k right singular vectors of H for the k largest singular values,
/// in descending order, each column's phase fixed so its largest-magnitude
/// entry is real positive. Under full-resolution DACs W is scaled by
/// 1/sqrt(k) so trace(W W^H) = 1.
Precoder build_svd_precoder(const ComplexMatrix& h, int k_streams,
                            QuantizerMode dac_mode = QuantizerMode::one_bit);

/// Same construction from already-computed right singular vectors (columns
/// sorted by descending singular value); avoids repeating the SVD when both
/// DAC modes are evaluated on one channel.
Precoder precoder_from_singular_vectors(const ComplexMatrix& v_cols,
                                        const RealVector& singular_values,
                                        int k_streams, QuantizerMode dac_mode);

/// One-bit mode: G_tx = sqrt(2 eta_tx / pi) Diag(C_x)^-1/2 and
/// C_t = (2/pi) eta_tx arcsine-map(C_x). Full-resolution mode: the identity
/// linearization (G_tx = I, C_t = C_x), since t = x.
TxLinearization tx_linearize(const Precoder& precoder,
                             const LinkConfig& config);

/// Distortion covariance C_d = C_t - G_tx C_x G_tx (diagnostic).
ComplexMatrix tx_distortion_cov(const TxLinearization& lin,
                                const Precoder& precoder);

}  // namespace onebit
