#pragma once

#include "onebit/rx_chain.hpp"

// One fully linearized link instance: everything derived from (H, config)
// that the metrics need.

namespace onebit {

struct LinearizedLink {
  LinkConfig config;
  ComplexMatrix h;  // M x N
  Precoder precoder;
  TxLinearization tx;
  RxLinearization rx;
  Combiner combiner;  // V*, unless replaced by the caller
};

/// Runs the whole derivation chain for one channel realization: SVD
/// precoder, transmitter and receiver linearizations, and the MSE-optimal
/// combiner.
LinearizedLink linearize_link(const ComplexMatrix& h, const LinkConfig& config);

/// Same chain starting from a prebuilt precoder (used when several DAC modes
/// share one SVD).
LinearizedLink linearize_link(const ComplexMatrix& h, const LinkConfig& config,
                              const Precoder& precoder);

}  // namespace onebit
