#pragma once

#include "onebit/metrics.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

// Declarative sweep configs, experiment drivers, CSV emission, and
// deterministic parallel execution across channel realizations.

namespace onebit {

enum class ExperimentKind {
  mse_vs_nm,        // N = M swept jointly
  mse_vs_n_fixed_m, // cartesian N x M
  mse_vs_k,
  ser_scatter,      // 16-PSK SER plus soft-estimate scatter samples
  validation_suite, // invariant checks on each grid point
};

enum class ChannelModel { physical, iid };

const char* to_string(ExperimentKind kind);
const char* to_string(ChannelModel model);

/// Declarative description of one sweep. JSON field names match the struct
/// comments exactly; unknown keys are rejected so a typo cannot silently
/// change the science.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::mse_vs_nm;  // "experiment-kind"
  std::vector<int> n_list;                          // "N"
  std::vector<int> m_list;                          // "M" (optional: M = N)
  std::vector<int> k_list;                          // "K"
  std::vector<double> rho_db_list;                  // "rho_dB"
  ChannelModel channel_model = ChannelModel::physical;  // "channel-model"
  int realizations = 50;                            // "realizations"
  long symbol_draws = 100000;                       // "symbol-draws"
  std::vector<QuantizerMode> dac_modes{QuantizerMode::one_bit};  // "dac-modes"
  std::uint64_t seed = 1;                           // "seed"
  std::string output_path;                          // "output-path" (optional)

  static ExperimentSpec from_json_text(const std::string& text);
  static ExperimentSpec from_json_file(const std::filesystem::path& path);
};

struct GridPoint {
  int n = 0;
  int m = 0;
  int k = 0;
  double rho_db = 0.0;
};

struct SweepRow {
  GridPoint point;
  QuantizerMode dac_mode = QuantizerMode::one_bit;
  int realizations = 0;
  double eps_tilde = std::numeric_limits<double>::quiet_NaN();
  double eps_mc = std::numeric_limits<double>::quiet_NaN();
  double eps_mc_stderr = std::numeric_limits<double>::quiet_NaN();
  double ser = std::numeric_limits<double>::quiet_NaN();
  long ser_errors = 0;
  long ser_symbols = 0;
  double wilson_low = std::numeric_limits<double>::quiet_NaN();
  double wilson_high = std::numeric_limits<double>::quiet_NaN();
  // validation-suite deviations (NaN for sweep kinds)
  double power_dev = std::numeric_limits<double>::quiet_NaN();
  double diag_ct_dev = std::numeric_limits<double>::quiet_NaN();
  double diag_cr_dev = std::numeric_limits<double>::quiet_NaN();
  double stationarity_res = std::numeric_limits<double>::quiet_NaN();
  double expansion_dev = std::numeric_limits<double>::quiet_NaN();
  // Wall time is measurement metadata: it is excluded from the determinism
  // contract and printed as the last CSV column.
  double wall_time_s = 0.0;
};

struct ScatterSet {
  GridPoint point;
  QuantizerMode dac_mode = QuantizerMode::one_bit;
  std::vector<ScatterSample> samples;
};

struct SweepResult {
  ExperimentSpec spec;
  std::vector<SweepRow> rows;         // one per grid point per dac mode
  std::vector<std::string> errors;    // infeasible grid points, etc.
  std::vector<ScatterSet> scatter;    // ser_scatter kind only
};

/// Worker count: SIM_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
int thread_count();

/// Grid expansion for a spec (kind-dependent combination of the lists).
std::vector<GridPoint> expand_grid(const ExperimentSpec& spec);

/// Empty string when the point is runnable; otherwise a reason (stream count
/// bound, or non-square array sizes under the physical model).
std::string validate_grid_point(const GridPoint& point,
                                const ExperimentSpec& spec);

/// Runs every feasible grid point: per realization draws a channel, builds
/// precoder/linearizations/combiner, and evaluates the approximate and Monte
/// Carlo MSE (and SER for ser_scatter). Deterministic for a fixed seed
/// regardless of worker count.
SweepResult run_experiment(const ExperimentSpec& spec);

/// Runs both (N, M) and (M, N) for every pair in the grid, emitting paired
/// rows (the swapped point follows the original immediately).
SweepResult run_nm_symmetry_probe(const ExperimentSpec& spec);

/// CSV with a header row, floats at 9 significant digits, and leading '#'
/// metadata lines; failed grid points appear as trailing '# error:' lines.
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

/// Writes one scatter CSV per scatter set next to `base`
/// (<stem>_scatter_<N>x<M>_<mode>.csv); returns the paths written.
std::vector<std::filesystem::path> write_scatter_outputs(
    const SweepResult& result, const std::filesystem::path& base);

}  // namespace onebit
