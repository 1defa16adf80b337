#include "onebit/rx_chain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace onebit {

RxSignal simulate_rx_signal(RngStream& rng, const ComplexMatrix& h,
                            const ComplexVector& t, double rho,
                            QuantizerMode adc_mode) {
  if (h.cols() != t.size())
    throw std::invalid_argument("simulate_rx_signal: H/t dimension mismatch");
  if (!(rho > 0.0))
    throw std::invalid_argument("simulate_rx_signal: rho must be > 0");

  RxSignal sig;
  sig.y = std::sqrt(rho) * (h * t) + sample_complex_gaussian(rng, h.rows());
  sig.r = adc_mode == QuantizerMode::one_bit ? quantize_1bit(sig.y, rho + 1.0)
                                             : sig.y;
  return sig;
}

RxLinearization rx_linearize(const ComplexMatrix& h,
                             const TxLinearization& tx_lin,
                             const LinkConfig& config) {
  if (h.rows() != config.m_rx || h.cols() != config.n_tx)
    throw std::invalid_argument("rx_linearize: H/config dimension mismatch");
  if (tx_lin.c_t.rows() != config.n_tx)
    throw std::invalid_argument("rx_linearize: C_t/config dimension mismatch");

  RxLinearization rx;
  rx.c_y = hermitianized(config.rho * (h * tx_lin.c_t * h.adjoint()) +
                         ComplexMatrix::Identity(config.m_rx, config.m_rx));

  if (config.adc_mode == QuantizerMode::full_resolution) {
    // Diagnostic bypass: r = y, so the linearization is exact and trivial.
    rx.g_rx = RealVector::Ones(config.m_rx);
    rx.c_r = rx.c_y;
    rx.adc_bypassed = true;
    return rx;
  }

  const double scale = std::sqrt(2.0 * config.eta_rx / std::numbers::pi);
  rx.g_rx = scale * rx.c_y.diagonal().real().cwiseSqrt().cwiseInverse();
  rx.c_r = (2.0 / std::numbers::pi) * config.eta_rx *
           elementwise_arcsine_map(rx.c_y);
  return rx;
}

ComplexMatrix rx_distortion_cov(const RxLinearization& rx_lin) {
  return hermitianized(rx_lin.c_r - rx_lin.g_rx.cast<Complex>().asDiagonal() *
                                        rx_lin.c_y *
                                        rx_lin.g_rx.cast<Complex>().asDiagonal());
}

Combiner optimal_combiner(const ComplexMatrix& h, const TxLinearization& tx_lin,
                          const RxLinearization& rx_lin,
                          const Precoder& precoder, const LinkConfig& config) {
  if (h.rows() != config.m_rx || h.cols() != config.n_tx)
    throw std::invalid_argument("optimal_combiner: H/config dimension mismatch");

  const ComplexMatrix rhs =
      rx_lin.g_rx.cast<Complex>().asDiagonal() *
      (h * (tx_lin.g_tx.cast<Complex>().asDiagonal() * precoder.w));
  Combiner c;
  c.v = std::sqrt(config.rho) *
        hermitian_solve(rx_lin.c_r, rhs,
                        rx_lin.adc_bypassed ? "C_y" : "C_r_tilde");
  return c;
}

}  // namespace onebit
