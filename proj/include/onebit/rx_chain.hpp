#pragma once

#include "onebit/tx_chain.hpp"

// Receiver side: channel pass, 1-bit ADC, receiver Bussgang linearization
// under the Gaussian approximation, and the MSE-optimal combiner.

namespace onebit {

/// Receiver linearization quantities. With 1-bit ADCs, g_rx and c_r hold the
/// Gaussian-approximation closed forms (G~_RX, C~_r); in the
/// full-resolution-ADC diagnostic mode they degenerate to G_RX = I and
/// C_r = C_y.
struct RxLinearization {
  ComplexMatrix c_y;  // E[y y^H] = rho H C_t H^H + I
  RealVector g_rx;    // diagonal of the receive Bussgang gain
  ComplexMatrix c_r;  // approximate E[r r^H]
  bool adc_bypassed = false;

  ComplexMatrix g_rx_matrix() const {
    return ComplexMatrix(g_rx.cast<Complex>().asDiagonal());
  }
};

struct Combiner {
  ComplexMatrix v;  // M x K
};

struct RxSignal {
  ComplexVector y;  // pre-ADC
  ComplexVector r;  // post-ADC
};

/// y = sqrt(rho) H t + z with fresh z ~ CN(0, I); r = Q(y, rho + 1) with
/// 1-bit ADCs, r = y when bypassed.
RxSignal simulate_rx_signal(RngStream& rng, const ComplexMatrix& h,
                            const ComplexVector& t, double rho,
                            QuantizerMode adc_mode = QuantizerMode::one_bit);

/// C_y = rho H C_t H^H + I; G~_RX = sqrt(2 eta_rx / pi) Diag(C_y)^-1/2;
/// C~_r = (2/pi) eta_rx arcsine-map(C_y).
RxLinearization rx_linearize(const ComplexMatrix& h,
                             const TxLinearization& tx_lin,
                             const LinkConfig& config);

/// Approximate receiver distortion covariance C~_r - G~ C_y G~ (diagnostic).
ComplexMatrix rx_distortion_cov(const RxLinearization& rx_lin);

/// V* = sqrt(rho) C~_r^-1 G~_RX H G_TX W, the minimizer of the approximate
/// MSE; the inverse goes through a Cholesky solve, never an explicit inverse.
Combiner optimal_combiner(const ComplexMatrix& h, const TxLinearization& tx_lin,
                          const RxLinearization& rx_lin,
                          const Precoder& precoder, const LinkConfig& config);

}  // namespace onebit
