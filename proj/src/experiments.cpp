#include "onebit/experiments.hpp"

#include "onebit/channel.hpp"
#include "onebit/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace onebit {

namespace {

using nlohmann::json;

constexpr int kClusterPaths = 100;
// Scatterers sit within pi/6 of broadside in each coordinate (full width
// pi/3). At side 20 this resolves ~10 directions per array axis, so the 100
// scatterers act as ~100 independent paths.
constexpr double kClusterSpread = std::numbers::pi / 3.0;
constexpr int kScatterDrawsPerMode = 125;  // realization 0 only
constexpr long kSerModeMseDraws = 10000;   // Gaussian-design MSE in SER runs

ExperimentKind parse_kind(const std::string& s) {
  if (s == "mse-vs-nm") return ExperimentKind::mse_vs_nm;
  if (s == "mse-vs-n-fixed-m") return ExperimentKind::mse_vs_n_fixed_m;
  if (s == "mse-vs-k") return ExperimentKind::mse_vs_k;
  if (s == "ser-scatter") return ExperimentKind::ser_scatter;
  if (s == "validation-suite") return ExperimentKind::validation_suite;
  throw std::invalid_argument("ExperimentSpec: unknown experiment-kind '" + s +
                              "'");
}

ChannelModel parse_channel_model(const std::string& s) {
  if (s == "physical") return ChannelModel::physical;
  if (s == "iid") return ChannelModel::iid;
  throw std::invalid_argument("ExperimentSpec: unknown channel-model '" + s +
                              "'");
}

QuantizerMode parse_dac_mode(const std::string& s) {
  if (s == "one-bit") return QuantizerMode::one_bit;
  if (s == "full-resolution") return QuantizerMode::full_resolution;
  throw std::invalid_argument("ExperimentSpec: unknown dac mode '" + s + "'");
}

int exact_int_sqrt(int value) {
  const int root = static_cast<int>(std::lround(std::sqrt(double(value))));
  return root * root == value ? root : -1;
}

std::uint64_t grid_signature(const GridPoint& p, ChannelModel model) {
  const std::uint64_t a =
      stable_hash("grid-point", static_cast<std::uint64_t>(p.n),
                  static_cast<std::uint64_t>(p.m),
                  static_cast<std::uint64_t>(p.k));
  return stable_hash("grid-env", a, std::bit_cast<std::uint64_t>(p.rho_db),
                     static_cast<std::uint64_t>(model));
}

ComplexMatrix draw_channel(const ExperimentSpec& spec, const GridPoint& pt,
                           RngStream& rng) {
  if (spec.channel_model == ChannelModel::iid)
    return generate_iid_channel(rng, pt.m, pt.n).h;
  const ArrayGeometry geo_tx{exact_int_sqrt(pt.n), 0.5};
  const ArrayGeometry geo_rx{exact_int_sqrt(pt.m), 0.5};
  const ScattererCluster cluster{kClusterPaths, kClusterSpread, kClusterSpread,
                                 0.0, 0.0};
  return generate_physical_channel(rng, geo_tx, geo_rx, cluster).h;
}

struct ModeOutcome {
  double eps_tilde = std::numeric_limits<double>::quiet_NaN();
  MseReport mse;
  bool has_ser = false;
  SerReport ser;
  double power_dev = std::numeric_limits<double>::quiet_NaN();
  double diag_ct_dev = std::numeric_limits<double>::quiet_NaN();
  double diag_cr_dev = std::numeric_limits<double>::quiet_NaN();
  double stationarity_res = std::numeric_limits<double>::quiet_NaN();
  double expansion_dev = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct TaskOutcome {
  std::vector<ModeOutcome> modes;  // in spec.dac_modes order
  std::string error;
};

ModeOutcome evaluate_validation_checks(const LinearizedLink& link,
                                       RngStream& symbols) {
  ModeOutcome out;
  const auto& cfg = link.config;

  // Power constraint |t|^2 = 1 over a handful of Gaussian symbol draws.
  out.power_dev = 0.0;
  for (int d = 0; d < 4; ++d) {
    const ComplexVector s = sample_complex_gaussian(symbols, cfg.k_streams);
    const ComplexVector x = link.precoder.w * s;
    const ComplexVector t = quantize_1bit(x, cfg.eta_tx);
    out.power_dev = std::max(out.power_dev, std::abs(t.squaredNorm() - 1.0));
  }

  if (cfg.dac_mode == QuantizerMode::one_bit) {
    out.diag_ct_dev =
        (link.tx.c_t.diagonal().real().array() - cfg.eta_tx).abs().maxCoeff() /
        cfg.eta_tx;
  }
  out.diag_cr_dev =
      (link.rx.c_r.diagonal().real().array() - cfg.eta_rx).abs().maxCoeff() /
      cfg.eta_rx;

  const ComplexMatrix rhs =
      std::sqrt(cfg.rho) * (link.rx.g_rx_matrix() *
                            (link.h * (link.tx.g_tx_matrix() * link.precoder.w)));
  out.stationarity_res = (link.rx.c_r * link.combiner.v - rhs).norm() /
                         std::max(rhs.norm(), 1e-300);
  out.expansion_dev = mse_expansion_check(link, link.combiner);
  return out;
}

TaskOutcome evaluate_realization(const ExperimentSpec& spec,
                                 const GridPoint& pt, int realization) {
  TaskOutcome outcome;
  const std::uint64_t sig = grid_signature(pt, spec.channel_model);
  const auto r = static_cast<std::uint64_t>(realization);

  RngStream channel_rng(spec.seed, stable_hash("channel", sig, r));
  const ComplexMatrix h = draw_channel(spec, pt, channel_rng);
  const SvdResult dec = svd(h);

  for (const QuantizerMode mode : spec.dac_modes) {
    const auto t0 = std::chrono::steady_clock::now();
    const LinkConfig cfg =
        LinkConfig::make(pt.n, pt.m, pt.k, db_to_linear(pt.rho_db), mode);
    const Precoder precoder =
        precoder_from_singular_vectors(dec.v, dec.singular_values, pt.k, mode);
    const LinearizedLink link = linearize_link(h, cfg, precoder);

    ModeOutcome out;
    if (spec.kind == ExperimentKind::validation_suite) {
      RngStream symbols(spec.seed, stable_hash("symbols", sig, r));
      out = evaluate_validation_checks(link, symbols);
      out.eps_tilde = approximate_mse(link.combiner, link);
    } else {
      out.eps_tilde = approximate_mse(link.combiner, link);

      const bool ser_kind = spec.kind == ExperimentKind::ser_scatter;
      const Constellation constellation =
          ser_kind ? Constellation::psk(16) : Constellation::gaussian();
      const long mse_draws =
          ser_kind ? std::min(spec.symbol_draws, kSerModeMseDraws)
                   : spec.symbol_draws;
      {
        RngStream symbols(spec.seed, stable_hash("symbols", sig, r));
        RngStream noise(spec.seed, stable_hash("noise", sig, r));
        out.mse = monte_carlo_mse(symbols, noise, link, link.combiner,
                                  constellation, mse_draws);
      }
      if (ser_kind) {
        RngStream symbols(spec.seed, stable_hash("symbols", sig, r));
        RngStream noise(spec.seed, stable_hash("noise", sig, r));
        SerOptions options;
        options.scatter_limit = realization == 0 ? kScatterDrawsPerMode : 0;
        out.ser = estimate_ser(symbols, noise, link, link.combiner,
                               constellation, spec.symbol_draws, options);
        out.has_ser = true;
      }
    }
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    outcome.modes.push_back(std::move(out));
  }
  return outcome;
}

// Deterministic merge of per-realization outcomes into one row per mode.
void merge_point_rows(const ExperimentSpec& spec, const GridPoint& pt,
                      const std::vector<TaskOutcome>& outcomes,
                      SweepResult& result) {
  for (std::size_t mode_idx = 0; mode_idx < spec.dac_modes.size(); ++mode_idx) {
    SweepRow row;
    row.point = pt;
    row.dac_mode = spec.dac_modes[mode_idx];
    row.realizations = static_cast<int>(outcomes.size());

    double sum_tilde = 0.0;
    double sum_mc = 0.0;
    double sum_mc_sq = 0.0;
    double sum_within_var = 0.0;
    long mc_reports = 0;
    long ser_errors = 0;
    long ser_symbols = 0;
    double dev[5] = {0, 0, 0, 0, 0};
    bool has_dev = false;
    double wall = 0.0;

    for (const auto& task : outcomes) {
      const auto& out = task.modes[mode_idx];
      sum_tilde += out.eps_tilde;
      wall += out.seconds;
      if (out.mse.draws > 0) {
        sum_mc += out.mse.eps_mc;
        sum_mc_sq += out.mse.eps_mc * out.mse.eps_mc;
        sum_within_var += out.mse.eps_mc_stderr * out.mse.eps_mc_stderr;
        ++mc_reports;
      }
      if (out.has_ser) {
        ser_errors += out.ser.errors;
        ser_symbols += out.ser.symbol_count;
      }
      if (!std::isnan(out.power_dev)) {
        has_dev = true;
        dev[0] = std::max(dev[0], out.power_dev);
        if (!std::isnan(out.diag_ct_dev)) dev[1] = std::max(dev[1], out.diag_ct_dev);
        dev[2] = std::max(dev[2], out.diag_cr_dev);
        dev[3] = std::max(dev[3], out.stationarity_res);
        dev[4] = std::max(dev[4], out.expansion_dev);
      }
    }

    const auto realizations = static_cast<double>(outcomes.size());
    row.eps_tilde = sum_tilde / realizations;
    if (mc_reports > 0) {
      const auto n = static_cast<double>(mc_reports);
      row.eps_mc = sum_mc / n;
      if (mc_reports > 1) {
        // Spread of per-realization means: captures channel and symbol noise.
        const double var = (sum_mc_sq - n * row.eps_mc * row.eps_mc) / (n - 1.0);
        row.eps_mc_stderr = std::sqrt(std::max(var, 0.0) / n);
      } else {
        row.eps_mc_stderr = std::sqrt(sum_within_var);
      }
    }
    if (ser_symbols > 0) {
      row.ser = static_cast<double>(ser_errors) / static_cast<double>(ser_symbols);
      row.ser_errors = ser_errors;
      row.ser_symbols = ser_symbols;
      std::tie(row.wilson_low, row.wilson_high) =
          wilson_interval(ser_errors, ser_symbols);
    }
    if (has_dev) {
      row.power_dev = dev[0];
      row.diag_ct_dev = dev[1];
      row.diag_cr_dev = dev[2];
      row.stationarity_res = dev[3];
      row.expansion_dev = dev[4];
    }
    row.wall_time_s = wall;
    result.rows.push_back(std::move(row));
  }

  if (spec.kind == ExperimentKind::ser_scatter) {
    for (std::size_t mode_idx = 0; mode_idx < spec.dac_modes.size();
         ++mode_idx) {
      const auto& first = outcomes.front().modes[mode_idx];
      if (first.has_ser && !first.ser.scatter.empty())
        result.scatter.push_back(
            {pt, spec.dac_modes[mode_idx], first.ser.scatter});
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::mse_vs_nm: return "mse-vs-nm";
    case ExperimentKind::mse_vs_n_fixed_m: return "mse-vs-n-fixed-m";
    case ExperimentKind::mse_vs_k: return "mse-vs-k";
    case ExperimentKind::ser_scatter: return "ser-scatter";
    case ExperimentKind::validation_suite: return "validation-suite";
  }
  return "unknown";
}

const char* to_string(ChannelModel model) {
  return model == ChannelModel::physical ? "physical" : "iid";
}

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("ExperimentSpec: bad JSON: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("ExperimentSpec: top level must be an object");

  static const std::vector<std::string> known = {
      "experiment-kind", "N",           "M",
      "K",               "rho_dB",      "channel-model",
      "realizations",    "symbol-draws", "dac-modes",
      "seed",            "output-path"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("ExperimentSpec: unknown key '" + key + "'");
  }

  auto require = [&](const char* key) -> const json& {
    if (!j.contains(key))
      throw std::invalid_argument(std::string("ExperimentSpec: missing key '") +
                                  key + "'");
    return j.at(key);
  };

  ExperimentSpec spec;
  spec.kind = parse_kind(require("experiment-kind").get<std::string>());
  spec.n_list = require("N").get<std::vector<int>>();
  if (j.contains("M")) spec.m_list = j.at("M").get<std::vector<int>>();
  spec.k_list = require("K").get<std::vector<int>>();
  spec.rho_db_list = require("rho_dB").get<std::vector<double>>();
  if (j.contains("channel-model"))
    spec.channel_model =
        parse_channel_model(j.at("channel-model").get<std::string>());
  if (j.contains("realizations"))
    spec.realizations = j.at("realizations").get<int>();
  if (j.contains("symbol-draws"))
    spec.symbol_draws = j.at("symbol-draws").get<long>();
  if (j.contains("dac-modes")) {
    spec.dac_modes.clear();
    for (const auto& item : j.at("dac-modes"))
      spec.dac_modes.push_back(parse_dac_mode(item.get<std::string>()));
    if (spec.dac_modes.empty())
      throw std::invalid_argument("ExperimentSpec: dac-modes must not be empty");
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("output-path"))
    spec.output_path = j.at("output-path").get<std::string>();

  if (spec.n_list.empty() || spec.k_list.empty() || spec.rho_db_list.empty())
    throw std::invalid_argument(
        "ExperimentSpec: N, K, and rho_dB must be non-empty lists");
  if (spec.realizations < 1)
    throw std::invalid_argument("ExperimentSpec: realizations must be >= 1");
  if (spec.symbol_draws < 1)
    throw std::invalid_argument("ExperimentSpec: symbol-draws must be >= 1");
  return spec;
}

ExperimentSpec ExperimentSpec::from_json_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("ExperimentSpec: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

int thread_count() {
  if (const char* env = std::getenv("SIM_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<GridPoint> expand_grid(const ExperimentSpec& spec) {
  const bool zip_nm = spec.kind == ExperimentKind::mse_vs_nm ||
                      spec.kind == ExperimentKind::ser_scatter;

  std::vector<std::pair<int, int>> nm_pairs;
  if (zip_nm) {
    if (!spec.m_list.empty() && spec.m_list != spec.n_list)
      throw std::invalid_argument(
          std::string(to_string(spec.kind)) +
          ": M must be omitted or equal to N (antennas swept jointly)");
    for (int n : spec.n_list) nm_pairs.emplace_back(n, n);
  } else if (spec.m_list.empty()) {
    for (int n : spec.n_list) nm_pairs.emplace_back(n, n);
  } else {
    for (int n : spec.n_list)
      for (int m : spec.m_list) nm_pairs.emplace_back(n, m);
  }

  std::vector<GridPoint> grid;
  for (const auto& [n, m] : nm_pairs)
    for (int k : spec.k_list)
      for (double rho_db : spec.rho_db_list) grid.push_back({n, m, k, rho_db});
  return grid;
}

std::string validate_grid_point(const GridPoint& point,
                                const ExperimentSpec& spec) {
  std::ostringstream msg;
  if (point.n < 1 || point.m < 1 || point.k < 1) {
    msg << "grid point (N=" << point.n << ", M=" << point.m << ", K=" << point.k
        << "): all dimensions must be >= 1";
    return msg.str();
  }
  if (point.k > std::min(point.n, point.m)) {
    msg << "grid point (N=" << point.n << ", M=" << point.m << ", K=" << point.k
        << "): K exceeds min(N, M)";
    return msg.str();
  }
  if (spec.channel_model == ChannelModel::physical &&
      (exact_int_sqrt(point.n) < 0 || exact_int_sqrt(point.m) < 0)) {
    msg << "grid point (N=" << point.n << ", M=" << point.m
        << "): physical channel model requires square array sizes";
    return msg.str();
  }
  return {};
}

SweepResult run_experiment(const ExperimentSpec& spec) {
  SweepResult result;
  result.spec = spec;

  const std::vector<GridPoint> grid = expand_grid(spec);
  std::vector<GridPoint> runnable;
  for (const auto& pt : grid) {
    if (std::string err = validate_grid_point(pt, spec); !err.empty())
      result.errors.push_back(std::move(err));
    else
      runnable.push_back(pt);
  }

  // Flat (point, realization) task list executed by a worker pool; outcomes
  // land in slots indexed by task id, so scheduling order cannot affect the
  // merged rows.
  const int realizations = spec.realizations;
  const std::size_t task_count = runnable.size() * realizations;
  std::vector<TaskOutcome> outcomes(task_count);
  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= task_count) return;
      const auto point_idx = task / realizations;
      const auto realization = static_cast<int>(task % realizations);
      try {
        outcomes[task] =
            evaluate_realization(spec, runnable[point_idx], realization);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const int workers =
      std::max(1, std::min<int>(thread_count(), static_cast<int>(task_count)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (std::size_t p = 0; p < runnable.size(); ++p) {
    std::vector<TaskOutcome> point_outcomes(
        outcomes.begin() + p * realizations,
        outcomes.begin() + (p + 1) * realizations);
    merge_point_rows(spec, runnable[p], point_outcomes, result);
  }

  if (!spec.output_path.empty()) emit_csv(result, spec.output_path);
  return result;
}

SweepResult run_nm_symmetry_probe(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::mse_vs_n_fixed_m)
    throw std::invalid_argument(
        "run_nm_symmetry_probe: spec kind must be mse-vs-n-fixed-m");

  ExperimentSpec inner = spec;
  inner.output_path.clear();

  SweepResult result;
  result.spec = spec;

  // Run each pair and its swap back to back so consumers see paired rows.
  for (const GridPoint& pt : expand_grid(spec)) {
    for (const GridPoint& probe :
         {pt, GridPoint{pt.m, pt.n, pt.k, pt.rho_db}}) {
      ExperimentSpec one = inner;
      one.n_list = {probe.n};
      one.m_list = {probe.m};
      one.k_list = {probe.k};
      one.rho_db_list = {probe.rho_db};
      SweepResult partial = run_experiment(one);
      for (auto& row : partial.rows) result.rows.push_back(std::move(row));
      for (auto& err : partial.errors) result.errors.push_back(std::move(err));
    }
  }

  if (!spec.output_path.empty()) emit_csv(result, spec.output_path);
  return result;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("emit_csv: cannot open " + path.string());

  const ExperimentSpec& spec = result.spec;
  out << "# onebit-mimo " << kVersion << "\n";
  out << "# experiment-kind: " << to_string(spec.kind) << "\n";
  out << "# seed: " << spec.seed << "\n";
  out << "# channel-model: " << to_string(spec.channel_model);
  if (spec.channel_model == ChannelModel::physical)
    out << " (paths=" << kClusterPaths
        << ", scatterers within pi/6 of broadside in azimuth and elevation, "
           "uniform i.i.d. angle draws, independent per side, "
           "gains CN(0,1), scale 1/sqrt(paths))";
  out << "\n";
  out << "# realizations: " << spec.realizations << "\n";
  out << "# symbol-draws: " << spec.symbol_draws << "\n";
  out << "# dac-modes:";
  for (const QuantizerMode mode : spec.dac_modes)
    out << ' ' << to_string(mode);
  out << "\n";
  if (spec.kind == ExperimentKind::ser_scatter)
    out << "# constellation: 16-PSK\n";

  const bool validation = spec.kind == ExperimentKind::validation_suite;
  if (validation) {
    out << "N,M,K,rho_db,dac_mode,channel,realizations,eps_tilde,power_dev,"
           "diag_ct_dev,diag_cr_dev,stationarity_res,expansion_dev,"
           "wall_time_s\n";
  } else {
    out << "N,M,K,rho_db,dac_mode,channel,realizations,eps_tilde,eps_mc,"
           "eps_mc_stderr,ser,ser_errors,ser_symbols,wall_time_s\n";
  }

  for (const auto& row : result.rows) {
    // Re-validate the row parameters on write.
    (void)LinkConfig::make(row.point.n, row.point.m, row.point.k,
                           db_to_linear(row.point.rho_db), row.dac_mode);
    out << row.point.n << ',' << row.point.m << ',' << row.point.k << ','
        << format_double(row.point.rho_db) << ',' << to_string(row.dac_mode)
        << ',' << to_string(spec.channel_model) << ',' << row.realizations
        << ',' << format_double(row.eps_tilde) << ',';
    if (validation) {
      out << format_double(row.power_dev) << ','
          << format_double(row.diag_ct_dev) << ','
          << format_double(row.diag_cr_dev) << ','
          << format_double(row.stationarity_res) << ','
          << format_double(row.expansion_dev) << ',';
    } else {
      out << format_double(row.eps_mc) << ','
          << format_double(row.eps_mc_stderr) << ',' << format_double(row.ser)
          << ',' << row.ser_errors << ',' << row.ser_symbols << ',';
    }
    out << format_double(row.wall_time_s) << "\n";
  }

  for (const auto& err : result.errors) out << "# error: " << err << "\n";
  if (!out)
    throw std::runtime_error("emit_csv: write failed for " + path.string());
}

std::vector<std::filesystem::path> write_scatter_outputs(
    const SweepResult& result, const std::filesystem::path& base) {
  std::vector<std::filesystem::path> written;
  for (const auto& set : result.scatter) {
    std::ostringstream name;
    name << base.stem().string() << "_scatter_" << set.point.n << "x"
         << set.point.m << "_"
         << (set.dac_mode == QuantizerMode::one_bit ? "one-bit" : "full-res")
         << ".csv";
    std::filesystem::path path = base.parent_path() / name.str();
    write_scatter_csv(path, set.samples, to_string(set.dac_mode));
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace onebit
