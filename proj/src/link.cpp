#include "onebit/link.hpp"

#include <stdexcept>

namespace onebit {

LinearizedLink linearize_link(const ComplexMatrix& h, const LinkConfig& config,
                              const Precoder& precoder) {
  if (h.rows() != config.m_rx || h.cols() != config.n_tx)
    throw std::invalid_argument("linearize_link: H/config dimension mismatch");

  LinearizedLink link;
  link.config = config;
  link.h = h;
  link.precoder = precoder;
  link.tx = tx_linearize(link.precoder, config);
  link.rx = rx_linearize(h, link.tx, config);
  link.combiner = optimal_combiner(h, link.tx, link.rx, link.precoder, config);
  return link;
}

LinearizedLink linearize_link(const ComplexMatrix& h,
                              const LinkConfig& config) {
  return linearize_link(h, config,
                        build_svd_precoder(h, config.k_streams, config.dac_mode));
}

}  // namespace onebit
