#include "onebit/metrics.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace onebit {

namespace {

// Monte Carlo loops consume draws in fixed-size chunks and accumulate in
// chunk order, so totals are reproducible bit for bit.
constexpr long kMcChunk = 512;

constexpr double kZ95 = 1.959963984540054;

// K x B symbol matrix; PSK indices (when requested) are drawn row-major per
// column: stream 0 first within each draw.
ComplexMatrix draw_symbols(RngStream& symbols, const Constellation& cst,
                           Eigen::Index k, Eigen::Index cols,
                           Eigen::MatrixXi* indices) {
  if (!cst.is_psk()) {
    return sample_complex_gaussian_matrix(symbols, k, cols);
  }
  const auto& pts = cst.points();
  const auto order = static_cast<std::uint64_t>(pts.size());
  ComplexMatrix s(k, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto idx = static_cast<int>(symbols.next_u64() % order);
      if (indices) (*indices)(i, j) = idx;
      s(i, j) = pts[static_cast<std::size_t>(idx)];
    }
  }
  return s;
}

// End-to-end chain for one batch of symbol columns: DAC, channel + noise,
// ADC, combining.
ComplexMatrix soft_estimates(const ComplexMatrix& s, RngStream& noise,
                             const LinearizedLink& link, const Combiner& v) {
  const auto& cfg = link.config;
  ComplexMatrix x = link.precoder.w * s;
  if (cfg.dac_mode == QuantizerMode::one_bit) x = quantize_1bit(x, cfg.eta_tx);
  ComplexMatrix y =
      std::sqrt(cfg.rho) * (link.h * x) +
      sample_complex_gaussian_matrix(noise, cfg.m_rx, s.cols());
  if (cfg.adc_mode == QuantizerMode::one_bit) y = quantize_1bit(y, cfg.eta_rx);
  return v.v.adjoint() * y;
}

// Minimum distance to a unit-modulus point is maximum correlation; the
// correlation form makes the all-equal tie at s_hat = 0 exact in floating
// point (every score is 0.0), so ties resolve to the lowest index.
int nearest_point(Complex s_hat, const std::vector<Complex>& pts) {
  int best = 0;
  double best_score = s_hat.real() * pts[0].real() + s_hat.imag() * pts[0].imag();
  for (int k = 1; k < static_cast<int>(pts.size()); ++k) {
    const auto& p = pts[static_cast<std::size_t>(k)];
    const double score = s_hat.real() * p.real() + s_hat.imag() * p.imag();
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

}  // namespace

Constellation Constellation::psk(int order) {
  if (order < 2)
    throw std::invalid_argument("Constellation::psk: order must be >= 2");
  Constellation c;
  c.points_.reserve(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    const double phase = 2.0 * std::numbers::pi * k / order;
    c.points_.push_back({std::cos(phase), std::sin(phase)});
  }
  return c;
}

Constellation Constellation::gaussian() { return {}; }

double approximate_mse(const Combiner& v, const LinearizedLink& link) {
  const auto& cfg = link.config;
  if (v.v.rows() != cfg.m_rx || v.v.cols() != cfg.k_streams)
    throw std::invalid_argument("approximate_mse: combiner dimension mismatch");

  const double k = cfg.k_streams;
  const ComplexMatrix cross_chain =
      link.rx.g_rx.cast<Complex>().asDiagonal() *
      (link.h * (link.tx.g_tx.cast<Complex>().asDiagonal() * link.precoder.w));
  const double quad = (v.v.adjoint() * link.rx.c_r * v.v).trace().real();
  const double cross = (v.v.adjoint() * cross_chain).trace().real();
  return 1.0 + quad / k - (2.0 / k) * std::sqrt(cfg.rho) * cross;
}

MseReport monte_carlo_mse(RngStream& symbols, RngStream& noise,
                          const LinearizedLink& link, const Combiner& v,
                          const Constellation& constellation, long draws) {
  if (draws < 1)
    throw std::invalid_argument("monte_carlo_mse: draws must be >= 1");

  const double k = link.config.k_streams;
  double sum = 0.0;
  double sum_sq = 0.0;
  long done = 0;
  while (done < draws) {
    const long batch = std::min(kMcChunk, draws - done);
    const ComplexMatrix s =
        draw_symbols(symbols, constellation, link.config.k_streams, batch,
                     nullptr);
    const ComplexMatrix s_hat = soft_estimates(s, noise, link, v);
    for (Eigen::Index j = 0; j < batch; ++j) {
      const double err = (s.col(j) - s_hat.col(j)).squaredNorm() / k;
      sum += err;
      sum_sq += err * err;
    }
    done += batch;
  }

  MseReport report;
  report.eps_tilde = approximate_mse(v, link);
  report.draws = draws;
  report.eps_mc = sum / static_cast<double>(draws);
  if (draws > 1) {
    const double var =
        (sum_sq - static_cast<double>(draws) * report.eps_mc * report.eps_mc) /
        static_cast<double>(draws - 1);
    report.eps_mc_stderr =
        std::sqrt(std::max(var, 0.0) / static_cast<double>(draws));
  }
  return report;
}

double mse_expansion_check(const LinearizedLink& link, const Combiner& v) {
  const auto& cfg = link.config;
  const double k = cfg.k_streams;

  // Exact-MSE expansion, term by term: the symbol correlation E[r s^H] is
  // formed explicitly (E[s s^H] = I for unit-power streams) before the
  // traces are taken.
  const ComplexMatrix e_ss =
      ComplexMatrix::Identity(cfg.k_streams, cfg.k_streams);
  const ComplexMatrix e_rs =
      std::sqrt(cfg.rho) *
      (link.rx.g_rx_matrix() *
       (link.h * (link.tx.g_tx_matrix() * (link.precoder.w * e_ss))));
  const double eps_expanded =
      1.0 + (v.v.adjoint() * (link.rx.c_r * v.v)).trace().real() / k -
      (2.0 / k) * (v.v.adjoint() * e_rs).trace().real();

  return std::abs(eps_expanded - approximate_mse(v, link));
}

std::vector<int> detect_psk(const ComplexVector& s_hat,
                            const Constellation& constellation) {
  if (!constellation.is_psk())
    throw std::invalid_argument("detect_psk: constellation has no points");
  std::vector<int> out(static_cast<std::size_t>(s_hat.size()));
  for (Eigen::Index i = 0; i < s_hat.size(); ++i)
    out[static_cast<std::size_t>(i)] =
        nearest_point(s_hat(i), constellation.points());
  return out;
}

SerReport estimate_ser(RngStream& symbols, RngStream& noise,
                       const LinearizedLink& link, const Combiner& v,
                       const Constellation& constellation, long symbol_draws,
                       const SerOptions& options) {
  if (!constellation.is_psk())
    throw std::invalid_argument("estimate_ser: PSK constellation required");
  if (symbol_draws < 1)
    throw std::invalid_argument("estimate_ser: symbol_draws must be >= 1");

  const int k = link.config.k_streams;
  const auto& pts = constellation.points();

  // Optional per-stream gain fit on pilot draws; detection then divides the
  // soft estimates by the fitted gains.
  ComplexVector gain = ComplexVector::Ones(k);
  if (options.gain_calibration && options.pilot_draws > 0) {
    ComplexVector num = ComplexVector::Zero(k);
    RealVector den = RealVector::Zero(k);
    long done = 0;
    while (done < options.pilot_draws) {
      const long batch = std::min(kMcChunk, options.pilot_draws - done);
      const ComplexMatrix s =
          draw_symbols(symbols, constellation, k, batch, nullptr);
      const ComplexMatrix s_hat = soft_estimates(s, noise, link, v);
      num += (s.conjugate().cwiseProduct(s_hat)).rowwise().sum();
      den += s.cwiseAbs2().rowwise().sum();
      done += batch;
    }
    for (int i = 0; i < k; ++i) {
      const Complex g = num(i) / den(i);
      gain(i) = std::abs(g) > 1e-12 ? g : Complex{1.0, 0.0};
    }
  }

  SerReport report;
  report.per_stream_ser.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<long> stream_errors(static_cast<std::size_t>(k), 0);

  Eigen::MatrixXi tx_indices(k, kMcChunk);
  long done = 0;
  while (done < symbol_draws) {
    const long batch = std::min(kMcChunk, symbol_draws - done);
    const ComplexMatrix s =
        draw_symbols(symbols, constellation, k, batch, &tx_indices);
    ComplexMatrix s_hat = soft_estimates(s, noise, link, v);
    for (Eigen::Index j = 0; j < batch; ++j) {
      for (int i = 0; i < k; ++i) {
        const Complex est = s_hat(i, j) / gain(i);
        if (nearest_point(est, pts) != tx_indices(i, j))
          ++stream_errors[static_cast<std::size_t>(i)];
      }
      if (static_cast<long>(report.scatter.size()) < options.scatter_limit * k)
        for (int i = 0; i < k; ++i)
          report.scatter.push_back({i, s(i, j), s_hat(i, j) / gain(i)});
    }
    done += batch;
  }

  report.symbol_count = symbol_draws * k;
  for (int i = 0; i < k; ++i) {
    report.errors += stream_errors[static_cast<std::size_t>(i)];
    report.per_stream_ser[static_cast<std::size_t>(i)] =
        static_cast<double>(stream_errors[static_cast<std::size_t>(i)]) /
        static_cast<double>(symbol_draws);
  }
  report.ser = static_cast<double>(report.errors) /
               static_cast<double>(report.symbol_count);
  std::tie(report.wilson_low, report.wilson_high) =
      wilson_interval(report.errors, report.symbol_count);
  return report;
}

std::pair<double, double> wilson_interval(long errors, long trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The lower bound is exactly 0 at p = 0 (and dually at p = 1); round-off
  // in center - half must not leak through.
  const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = errors == trials ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

void write_scatter_csv(const std::filesystem::path& path,
                       const std::vector<ScatterSample>& samples,
                       const std::string& mode_label) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_scatter_csv: cannot open " + path.string());
  out << "stream,re_s,im_s,re_shat,im_shat,mode\n";
  char line[256];
  for (const auto& sample : samples) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g,%s\n",
                  sample.stream, sample.s.real(), sample.s.imag(),
                  sample.s_hat.real(), sample.s_hat.imag(),
                  mode_label.c_str());
    out << line;
  }
  if (!out)
    throw std::runtime_error("write_scatter_csv: write failed for " +
                             path.string());
}

}  // namespace onebit
