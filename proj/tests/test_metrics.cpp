#include "onebit/metrics.hpp"

#include "onebit/channel.hpp"
#include "support/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

using namespace onebit;

namespace {

LinearizedLink make_iid_link(std::uint64_t seed, int n, int m, int k,
                             double rho,
                             QuantizerMode dac = QuantizerMode::one_bit,
                             QuantizerMode adc = QuantizerMode::one_bit) {
  RngStream rng(seed, 0);
  const ComplexMatrix h = generate_iid_channel(rng, m, n).h;
  return linearize_link(h, LinkConfig::make(n, m, k, rho, dac, adc));
}

// Independent detection oracle for PSK: round the phase to the nearest
// sector; used to cross-check the distance-based detector.
int phase_round_detect(Complex s_hat, int order) {
  const double sector = 2.0 * std::numbers::pi / order;
  long idx = std::lround(std::arg(s_hat) / sector);
  return static_cast<int>(((idx % order) + order) % order);
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("PSK constellation points are unit-power and distinct") {
  const Constellation c = Constellation::psk(16);
  REQUIRE(c.order() == 16);
  for (int i = 0; i < 16; ++i) {
    CHECK(std::abs(std::abs(c.points()[i]) - 1.0) < 1e-15);
    for (int j = i + 1; j < 16; ++j)
      CHECK(std::abs(c.points()[i] - c.points()[j]) > 1e-3);
  }
  CHECK_FALSE(Constellation::gaussian().is_psk());
}

TEST_CASE("approximate MSE with a zero combiner is one") {
  const LinearizedLink link = make_iid_link(1, 8, 8, 2, 10.0);
  const Combiner zero{ComplexMatrix::Zero(8, 2)};
  CHECK(approximate_mse(zero, link) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero channel: quadratic term only") {
  const int n = 4, m = 5, k = 2;
  const LinkConfig cfg = LinkConfig::make(n, m, k, 3.0);
  LinearizedLink link;
  link.config = cfg;
  link.h = ComplexMatrix::Zero(m, n);
  link.precoder.w = ComplexMatrix::Identity(n, k);
  link.precoder.c_x = link.precoder.w * link.precoder.w.adjoint();
  link.tx.g_tx = RealVector::Ones(n);
  link.tx.c_t = ComplexMatrix::Identity(n, n) / n;
  link.rx = rx_linearize(link.h, link.tx, cfg);
  RngStream rng(2, 0);
  const ComplexMatrix v = sample_complex_gaussian_matrix(rng, m, k);
  link.combiner.v = v;
  const double expected = 1.0 + cfg.eta_rx / k * v.squaredNorm();
  CHECK(approximate_mse(link.combiner, link) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("optimal-combiner simplification of the approximate MSE") {
  const LinearizedLink link = make_iid_link(3, 16, 12, 4, 10.0);
  const ComplexMatrix chain =
      link.rx.g_rx_matrix() *
      (link.h * (link.tx.g_tx_matrix() * link.precoder.w));
  const double simplified =
      1.0 - std::sqrt(link.config.rho) / link.config.k_streams *
                (link.combiner.v.adjoint() * chain).trace().real();
  CHECK(approximate_mse(link.combiner, link) ==
        doctest::Approx(simplified).epsilon(1e-10));
}

TEST_CASE("monte carlo MSE: noise-only limit with a zero combiner") {
  const LinearizedLink link = make_iid_link(4, 8, 8, 2, 1e-12);
  const Combiner zero{ComplexMatrix::Zero(8, 2)};
  RngStream symbols(5, 1), noise(5, 2);
  const MseReport report = monte_carlo_mse(symbols, noise, link, zero,
                                           Constellation::gaussian(), 20000);
  CHECK(report.eps_mc ==
        doctest::Approx(1.0).epsilon(5.0 * report.eps_mc_stderr + 0.02));
  CHECK(report.draws == 20000);
}

TEST_CASE("monte carlo MSE is deterministic in the streams") {
  const LinearizedLink link = make_iid_link(6, 8, 8, 2, 10.0);
  RngStream s1(7, 1), n1(7, 2), s2(7, 1), n2(7, 2);
  const MseReport a = monte_carlo_mse(s1, n1, link, link.combiner,
                                      Constellation::gaussian(), 5000);
  const MseReport b = monte_carlo_mse(s2, n2, link, link.combiner,
                                      Constellation::gaussian(), 5000);
  CHECK(a.eps_mc == b.eps_mc);
  CHECK(a.eps_mc_stderr == b.eps_mc_stderr);
}

TEST_CASE("monte carlo MSE is self-consistent across seed ranges") {
  const LinearizedLink link = make_iid_link(8, 16, 16, 2, 10.0);
  RngStream s1(9, 1), n1(9, 2), s2(10, 3), n2(10, 4);
  const MseReport a = monte_carlo_mse(s1, n1, link, link.combiner,
                                      Constellation::gaussian(), 40000);
  const MseReport b = monte_carlo_mse(s2, n2, link, link.combiner,
                                      Constellation::gaussian(), 40000);
  const double joint =
      std::sqrt(a.eps_mc_stderr * a.eps_mc_stderr +
                b.eps_mc_stderr * b.eps_mc_stderr);
  CHECK(std::abs(a.eps_mc - b.eps_mc) < 4.0 * joint);
}

TEST_CASE("MSE-expansion consistency holds to 1e-12 on random links") {
  RngStream shape_rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(shape_rng.next_u64() % 12);
    const int m = 4 + static_cast<int>(shape_rng.next_u64() % 12);
    const int k = 1 + static_cast<int>(shape_rng.next_u64() %
                                       static_cast<std::uint64_t>(std::min(n, m)));
    const LinearizedLink link =
        make_iid_link(100 + trial, n, m, k, db_to_linear(10.0));
    CHECK(mse_expansion_check(link, link.combiner) < 1e-12);
  }
}

TEST_CASE("MSE-expansion consistency is exactly zero for a zero combiner") {
  const LinearizedLink link = make_iid_link(12, 8, 8, 2, 10.0);
  const Combiner zero{ComplexMatrix::Zero(8, 2)};
  CHECK(mse_expansion_check(link, zero) == 0.0);
}

TEST_CASE("PSK detection: exact points, origin tie-break, boundaries") {
  const Constellation c = Constellation::psk(16);
  ComplexVector s_hat(3);
  s_hat << c.points()[5], Complex{0.0, 0.0},
      c.points()[9] * std::polar(1.0, std::numbers::pi / 16 - 1e-9);
  const std::vector<int> idx = detect_psk(s_hat, c);
  CHECK(idx[0] == 5);
  CHECK(idx[1] == 0);  // all distances equal; lowest index wins
  CHECK(idx[2] == 9);  // just inside the decision boundary
}

TEST_CASE("distance detector agrees with the phase-rounding oracle") {
  const Constellation c = Constellation::psk(16);
  RngStream rng(13, 0);
  ComplexVector s_hat(200);
  for (Eigen::Index i = 0; i < s_hat.size(); ++i)
    s_hat(i) = rng.next_complex_gaussian();
  const std::vector<int> idx = detect_psk(s_hat, c);
  for (Eigen::Index i = 0; i < s_hat.size(); ++i)
    CHECK(idx[static_cast<std::size_t>(i)] ==
          phase_round_detect(s_hat(i), 16));
}

TEST_CASE("detection shifts by one sector under a one-sector rotation") {
  const Constellation c = Constellation::psk(16);
  RngStream rng(14, 0);
  const Complex rot = std::polar(1.0, 2.0 * std::numbers::pi / 16);
  for (int trial = 0; trial < 100; ++trial) {
    ComplexVector s_hat(1);
    s_hat << rng.next_complex_gaussian();
    const int base = detect_psk(s_hat, c)[0];
    ComplexVector rotated(1);
    rotated << s_hat(0) * rot;
    CHECK(detect_psk(rotated, c)[0] == (base + 1) % 16);
  }
}

TEST_CASE("noiseless unquantized link detects perfectly") {
  // Diagnostic mode: full-resolution DACs and ADCs at enormous SNR.
  const LinearizedLink link =
      make_iid_link(15, 16, 16, 1, 1e9, QuantizerMode::full_resolution,
                    QuantizerMode::full_resolution);
  RngStream symbols(16, 1), noise(16, 2);
  const SerReport report = estimate_ser(symbols, noise, link, link.combiner,
                                        Constellation::psk(16), 10000);
  CHECK(report.errors == 0);
  CHECK(report.ser == 0.0);
  CHECK(report.symbol_count == 10000);
  CHECK(report.wilson_low == 0.0);
}

TEST_CASE("SER bookkeeping: pooled counts, per-stream split, scatter") {
  const LinearizedLink link = make_iid_link(17, 16, 16, 4, 2.0);
  RngStream symbols(18, 1), noise(18, 2);
  SerOptions options;
  options.scatter_limit = 10;
  const SerReport report = estimate_ser(symbols, noise, link, link.combiner,
                                        Constellation::psk(16), 2000, options);
  CHECK(report.symbol_count == 8000);
  long sum = 0;
  for (double per : report.per_stream_ser)
    sum += std::lround(per * 2000.0);
  CHECK(sum == report.errors);
  CHECK(report.ser == doctest::Approx(static_cast<double>(report.errors) / 8000.0));
  CHECK(report.scatter.size() == 40);  // 10 draws x 4 streams
  CHECK(report.wilson_low <= report.ser);
  CHECK(report.wilson_high >= report.ser);
}

TEST_CASE("gain calibration leaves PSK detection essentially unchanged") {
  const LinearizedLink link = make_iid_link(19, 32, 32, 4, 10.0);
  RngStream s1(20, 1), n1(20, 2), s2(20, 1), n2(20, 2);
  const SerReport raw = estimate_ser(s1, n1, link, link.combiner,
                                     Constellation::psk(16), 5000);
  SerOptions cal;
  cal.gain_calibration = true;
  const SerReport calibrated = estimate_ser(s2, n2, link, link.combiner,
                                            Constellation::psk(16), 5000, cal);
  // Calibration rescales magnitudes; PSK decisions depend on phase only, so
  // the two detectors may differ by at most statistical noise.
  const auto [lo, hi] = wilson_interval(raw.errors, raw.symbol_count);
  CHECK(calibrated.ser > lo * 0.5);
  CHECK(calibrated.ser < std::max(hi * 1.5, 1e-3));
}

TEST_CASE("wilson interval basics") {
  const auto [lo0, hi0] = wilson_interval(0, 1000);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  CHECK(hi0 < 0.01);
  const auto [lo, hi] = wilson_interval(50, 1000);
  CHECK(lo > 0.03);
  CHECK(hi < 0.07);
  CHECK(lo < 0.05);
  CHECK(hi > 0.05);
}

TEST_CASE("approximate MSE upper-bounds the Monte Carlo MSE on iid links") {
  for (const int n : {16, 64, 256}) {
    for (const int k : {2, 8, 16}) {
      const LinearizedLink link =
          make_iid_link(300 + n + k, n, n, k, db_to_linear(10.0));
      RngStream symbols(21, static_cast<std::uint64_t>(n + k));
      RngStream noise(22, static_cast<std::uint64_t>(n + k));
      const MseReport report = monte_carlo_mse(
          symbols, noise, link, link.combiner, Constellation::gaussian(), 2000);
      CHECK(report.eps_mc <= report.eps_tilde + 5.0 * report.eps_mc_stderr);
    }
  }
}

TEST_CASE("scatter CSV round-trips its samples") {
  std::vector<ScatterSample> samples;
  samples.push_back({0, {1.0, -0.5}, {0.25, 0.75}});
  samples.push_back({3, {-0.125, 0.0}, {1e-3, -2e-6}});
  const auto path = std::filesystem::temp_directory_path() / "onebit_scatter.csv";
  write_scatter_csv(path, samples, "one-bit");

  std::ifstream in(path);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "stream,re_s,im_s,re_shat,im_shat,mode");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    int stream;
    double re_s, im_s, re_hat, im_hat;
    char mode[32];
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%31s", &stream,
                        &re_s, &im_s, &re_hat, &im_hat, mode) == 6);
    const ScatterSample& ref = samples[static_cast<std::size_t>(rows - 1)];
    CHECK(stream == ref.stream);
    CHECK(re_s == doctest::Approx(ref.s.real()).epsilon(1e-9));
    CHECK(im_hat == doctest::Approx(ref.s_hat.imag()).epsilon(1e-9));
  }
  CHECK(rows == 2);
  std::filesystem::remove(path);
}

TEST_SUITE_END();
