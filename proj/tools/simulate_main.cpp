// simulate — command-line front end for the doubly 1-bit quantized massive
// MIMO link simulator.
//
//   simulate run <spec.json>          run a sweep described by a JSON spec
//   simulate validate <spec.json>     check a spec without running it
//   simulate figures <1|2|3|4>        run a built-in figure profile
//
// Worker count comes from SIM_THREADS (default: hardware parallelism).

#include "onebit/experiments.hpp"
#include "onebit/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

using namespace onebit;

void print_rows(const SweepResult& result) {
  std::printf("%6s %6s %4s %7s %-15s %12s %12s %12s %10s\n", "N", "M", "K",
              "rho_dB", "dac_mode", "eps_tilde", "eps_mc", "stderr", "ser");
  for (const auto& row : result.rows) {
    std::printf("%6d %6d %4d %7.2f %-15s %12.6g %12.6g %12.6g %10.4g\n",
                row.point.n, row.point.m, row.point.k, row.point.rho_db,
                to_string(row.dac_mode), row.eps_tilde, row.eps_mc,
                row.eps_mc_stderr, row.ser);
  }
  for (const auto& err : result.errors)
    std::printf("skipped: %s\n", err.c_str());
}

int run_spec(const ExperimentSpec& spec) {
  std::printf("running %s: %zu grid points x %d realizations on %d threads\n",
              to_string(spec.kind), expand_grid(spec).size(),
              spec.realizations, thread_count());
  const SweepResult result = spec.kind == ExperimentKind::mse_vs_n_fixed_m
                                 ? run_nm_symmetry_probe(spec)
                                 : run_experiment(spec);
  print_rows(result);
  if (!spec.output_path.empty()) {
    std::printf("wrote %s\n", spec.output_path.c_str());
    if (spec.kind == ExperimentKind::ser_scatter)
      for (const auto& path : write_scatter_outputs(result, spec.output_path))
        std::printf("wrote %s\n", path.string().c_str());
  }
  if (spec.kind == ExperimentKind::validation_suite) {
    bool ok = true;
    for (const auto& row : result.rows) {
      ok = ok && row.power_dev < 1e-12 && row.diag_cr_dev < 1e-12 &&
           row.stationarity_res < 1e-8 && row.expansion_dev < 1e-12;
      if (row.dac_mode == QuantizerMode::one_bit)
        ok = ok && row.diag_ct_dev < 1e-12;
    }
    std::printf("validation checks: %s\n", ok ? "PASS" : "FAIL");
    if (!ok) return 1;
  }
  return result.errors.empty() ? 0 : 1;
}

ExperimentSpec figure_spec(int figure, const std::string& scale,
                           const std::filesystem::path& out_dir,
                           std::uint64_t seed) {
  const bool paper = scale == "paper";
  ExperimentSpec spec;
  spec.seed = seed;
  spec.channel_model = ChannelModel::physical;

  switch (figure) {
    case 1:  // MSE vs N = M, both DAC modes
      spec.kind = ExperimentKind::mse_vs_nm;
      spec.n_list = paper ? std::vector<int>{400, 576, 784, 1024, 1296, 1600}
                          : std::vector<int>{400, 1024, 1600};
      spec.k_list = {16};
      spec.rho_db_list = {10.0};
      spec.dac_modes = {QuantizerMode::one_bit, QuantizerMode::full_resolution};
      spec.realizations = paper ? 1000 : 20;
      spec.symbol_draws = 1000;
      spec.output_path = (out_dir / "figure1_mse_vs_nm.csv").string();
      break;
    case 2:  // approximate MSE vs N for fixed M, plus the swapped pairs
      spec.kind = ExperimentKind::mse_vs_n_fixed_m;
      spec.n_list = paper ? std::vector<int>{400, 576, 784, 1024, 1296, 1600}
                          : std::vector<int>{400, 1024};
      spec.m_list = paper ? std::vector<int>{400, 1024, 1600}
                          : std::vector<int>{400, 1024};
      spec.k_list = {16};
      spec.rho_db_list = {10.0};
      spec.realizations = paper ? 1000 : 10;
      spec.symbol_draws = 500;
      spec.output_path = (out_dir / "figure2_mse_vs_n_fixed_m.csv").string();
      break;
    case 3:  // approximate MSE vs K
      spec.kind = ExperimentKind::mse_vs_k;
      spec.n_list = paper ? std::vector<int>{400, 1024, 1600}
                          : std::vector<int>{400};
      spec.k_list = {2, 4, 8, 16, 32, 64};
      spec.rho_db_list = {10.0};
      spec.realizations = paper ? 1000 : 20;
      spec.symbol_draws = 500;
      spec.output_path = (out_dir / "figure3_mse_vs_k.csv").string();
      break;
    case 4:  // 16-PSK soft-estimate scatter and SER
      spec.kind = ExperimentKind::ser_scatter;
      spec.n_list = {400, 1024, 1600};
      spec.k_list = {8};
      spec.rho_db_list = {10.0};
      spec.dac_modes = {QuantizerMode::one_bit, QuantizerMode::full_resolution};
      spec.realizations = paper ? 1000 : 8;
      spec.symbol_draws = paper ? 125000 : 12500;
      spec.output_path = (out_dir / "figure4_ser_scatter.csv").string();
      break;
    default:
      throw std::invalid_argument("figure must be 1, 2, 3, or 4");
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly 1-bit quantized massive MIMO link simulator"};
  app.set_version_flag("--version", std::string("simulate ") + kVersion);
  app.require_subcommand(1);

  std::string spec_path;
  auto* run_cmd = app.add_subcommand("run", "Run a sweep from a JSON spec");
  run_cmd->add_option("spec", spec_path, "Path to the JSON experiment spec")
      ->required()
      ->check(CLI::ExistingFile);

  std::string validate_path;
  auto* validate_cmd =
      app.add_subcommand("validate", "Validate a JSON spec without running");
  validate_cmd->add_option("spec", validate_path, "Path to the JSON spec")
      ->required()
      ->check(CLI::ExistingFile);

  int figure = 0;
  std::string scale = "reduced";
  std::string out_dir = ".";
  std::uint64_t seed = 20240;
  auto* figures_cmd =
      app.add_subcommand("figures", "Run a built-in figure profile");
  figures_cmd->add_option("figure", figure, "Figure number (1-4)")
      ->required()
      ->check(CLI::Range(1, 4));
  figures_cmd->add_option("--scale", scale, "reduced (default) or paper")
      ->check(CLI::IsMember({"reduced", "paper"}));
  figures_cmd->add_option("--out", out_dir, "Output directory");
  figures_cmd->add_option("--seed", seed, "Base RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      return run_spec(ExperimentSpec::from_json_file(spec_path));
    }
    if (*validate_cmd) {
      const ExperimentSpec spec = ExperimentSpec::from_json_file(validate_path);
      const auto grid = expand_grid(spec);
      int bad = 0;
      for (const auto& pt : grid) {
        if (std::string err = validate_grid_point(pt, spec); !err.empty()) {
          std::printf("infeasible: %s\n", err.c_str());
          ++bad;
        }
      }
      std::printf(
          "spec ok: kind=%s, %zu grid points (%d infeasible), %zu dac modes, "
          "%d realizations, %ld symbol draws, channel=%s, seed=%llu\n",
          to_string(spec.kind), grid.size(), bad, spec.dac_modes.size(),
          spec.realizations, spec.symbol_draws, to_string(spec.channel_model),
          static_cast<unsigned long long>(spec.seed));
      return bad == 0 ? 0 : 1;
    }
    if (*figures_cmd) {
      std::filesystem::create_directories(out_dir);
      return run_spec(figure_spec(figure, scale, out_dir, seed));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
