#pragma once

#include "onebit/link.hpp"

#include <filesystem>
#include <vector>

// Performance metrics: the closed-form approximate MSE, Monte Carlo true
// MSE, an algebraic cross-check of the two MSE expansions, and PSK detection
// with SER estimation.

namespace onebit {

/// Symbol source: unit-power PSK points exp(j 2 pi k / order), or Gaussian
/// CN(0, 1) symbols (the design assumption behind the approximate MSE).
class Constellation {
 public:
  static Constellation psk(int order);
  static Constellation gaussian();

  bool is_psk() const { return !points_.empty(); }
  int order() const { return static_cast<int>(points_.size()); }
  const std::vector<Complex>& points() const { return points_; }

 private:
  std::vector<Complex> points_;  // empty in gaussian mode
};

struct MseReport {
  double eps_tilde = 0.0;     // closed-form approximate MSE
  double eps_mc = 0.0;        // Monte Carlo mean of (1/K) |s - V^H r|^2
  double eps_mc_stderr = 0.0;
  long draws = 0;
};

struct ScatterSample {
  int stream = 0;
  Complex s;
  Complex s_hat;
};

struct SerReport {
  double ser = 0.0;
  long symbol_count = 0;
  long errors = 0;
  std::vector<double> per_stream_ser;
  double wilson_low = 0.0;   // 95% Wilson interval on the pooled SER
  double wilson_high = 0.0;
  std::vector<ScatterSample> scatter;  // first scatter_limit draws
};

struct SerOptions {
  long scatter_limit = 0;
  // Optional per-stream complex gain fit (least squares of s_hat ~ g s over
  // pilot draws) applied before detection. Off by default: the soft
  // estimates cluster near the true points without correction.
  bool gain_calibration = false;
  long pilot_draws = 1000;
};

/// eps~ = 1 + (1/K) tr(V^H C~_r V) - (2/K) sqrt(rho) tr(Re[V^H G~ H G_TX W]).
double approximate_mse(const Combiner& v, const LinearizedLink& link);

/// Averages (1/K) |s - V^H r|^2 over end-to-end simulations with fresh
/// symbols and noise per draw. Draws are consumed in fixed chunks so the
/// result is deterministic for fixed streams regardless of caller threading.
MseReport monte_carlo_mse(RngStream& symbols, RngStream& noise,
                          const LinearizedLink& link, const Combiner& v,
                          const Constellation& constellation, long draws);

/// |eps_expanded - eps~| where eps_expanded follows the exact-MSE expansion
/// term by term (E[r s^H] formed explicitly) and eps~ comes from
/// approximate_mse. The two are the same algebra; the gap guards
/// implementation drift between modules and must stay below 1e-12.
double mse_expansion_check(const LinearizedLink& link, const Combiner& v);

/// Per-stream nearest-constellation-point index (minimum Euclidean distance;
/// for PSK this is nearest phase). Ties break toward the lower index.
std::vector<int> detect_psk(const ComplexVector& s_hat,
                            const Constellation& constellation);

/// Transmits uniform i.i.d. constellation symbols per stream through the
/// full quantized chain, detects, and pools errors over streams and draws.
SerReport estimate_ser(RngStream& symbols, RngStream& noise,
                       const LinearizedLink& link, const Combiner& v,
                       const Constellation& constellation, long symbol_draws,
                       const SerOptions& options = {});

/// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(long errors, long trials);

/// CSV with columns (stream, re_s, im_s, re_shat, im_shat, mode).
void write_scatter_csv(const std::filesystem::path& path,
                       const std::vector<ScatterSample>& samples,
                       const std::string& mode_label);

}  // namespace onebit
