// pybind11 bindings exposing the main link-simulation operations to python.

#include "onebit/channel.hpp"
#include "onebit/experiments.hpp"
#include "onebit/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace onebit;

namespace {

py::dict row_to_dict(const SweepRow& row, const ExperimentSpec& spec) {
  py::dict d;
  d["N"] = row.point.n;
  d["M"] = row.point.m;
  d["K"] = row.point.k;
  d["rho_db"] = row.point.rho_db;
  d["dac_mode"] = std::string(to_string(row.dac_mode));
  d["channel"] = std::string(to_string(spec.channel_model));
  d["realizations"] = row.realizations;
  d["eps_tilde"] = row.eps_tilde;
  d["eps_mc"] = row.eps_mc;
  d["eps_mc_stderr"] = row.eps_mc_stderr;
  d["ser"] = row.ser;
  d["ser_errors"] = row.ser_errors;
  d["ser_symbols"] = row.ser_symbols;
  d["wall_time_s"] = row.wall_time_s;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Doubly 1-bit quantized massive MIMO link simulation: Bussgang "
      "linearization, approximate MSE, and Monte Carlo MSE/SER experiments.";
  m.attr("__version__") = kVersion;

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream_id") = 0)
      .def_property_readonly("seed", &RngStream::seed)
      .def_property_readonly("stream_id", &RngStream::stream_id)
      .def("next_u64", &RngStream::next_u64)
      .def("next_double", &RngStream::next_double)
      .def("next_gaussian", &RngStream::next_gaussian)
      .def("next_complex_gaussian", &RngStream::next_complex_gaussian);

  m.def("stable_hash", &stable_hash, py::arg("tag"), py::arg("a") = 0,
        py::arg("b") = 0, py::arg("c") = 0);

  // numerics
  m.def("svd", [](const ComplexMatrix& a) {
    SvdResult r = svd(a);
    return py::make_tuple(r.u, r.singular_values, r.v);
  });
  m.def("hermitian_solve", &hermitian_solve, py::arg("a"), py::arg("b"),
        py::arg("label") = "A");
  m.def("elementwise_arcsine_map", &elementwise_arcsine_map);
  m.def(
      "sample_complex_gaussian",
      [](RngStream& rng, Eigen::Index length) {
        return sample_complex_gaussian(rng, length);
      },
      py::arg("rng"), py::arg("length"));
  m.def(
      "sample_complex_gaussian_cov",
      [](RngStream& rng, const ComplexMatrix& cov) {
        return sample_complex_gaussian(rng, cov);
      },
      py::arg("rng"), py::arg("covariance"));

  // channel
  m.def(
      "upa_steering_vector",
      [](int side, double spacing, double azimuth, double elevation) {
        return upa_steering_vector({side, spacing}, azimuth, elevation);
      },
      py::arg("side"), py::arg("spacing"), py::arg("azimuth"),
      py::arg("elevation"));
  m.def(
      "generate_physical_channel",
      [](RngStream& rng, int side_tx, int side_rx, int paths, double spread) {
        return generate_physical_channel(
                   rng, {side_tx, 0.5}, {side_rx, 0.5},
                   {paths, spread, spread, 0.0, 0.0})
            .h;
      },
      py::arg("rng"), py::arg("side_tx"), py::arg("side_rx"),
      py::arg("paths") = 100, py::arg("spread") = 0.5235987755982988);
  m.def(
      "generate_iid_channel",
      [](RngStream& rng, int m_rx, int n_tx) {
        return generate_iid_channel(rng, m_rx, n_tx).h;
      },
      py::arg("rng"), py::arg("m_rx"), py::arg("n_tx"));

  // tx / rx chain
  py::enum_<QuantizerMode>(m, "QuantizerMode")
      .value("one_bit", QuantizerMode::one_bit)
      .value("full_resolution", QuantizerMode::full_resolution);

  py::class_<LinkConfig>(m, "LinkConfig")
      .def_static("make", &LinkConfig::make, py::arg("n_tx"), py::arg("m_rx"),
                  py::arg("k_streams"), py::arg("rho"),
                  py::arg("dac_mode") = QuantizerMode::one_bit,
                  py::arg("adc_mode") = QuantizerMode::one_bit)
      .def_readonly("n_tx", &LinkConfig::n_tx)
      .def_readonly("m_rx", &LinkConfig::m_rx)
      .def_readonly("k_streams", &LinkConfig::k_streams)
      .def_readonly("rho", &LinkConfig::rho)
      .def_readonly("eta_tx", &LinkConfig::eta_tx)
      .def_readonly("eta_rx", &LinkConfig::eta_rx)
      .def_readonly("dac_mode", &LinkConfig::dac_mode)
      .def_readonly("adc_mode", &LinkConfig::adc_mode);

  m.def("db_to_linear", &db_to_linear);
  m.def("quantize_1bit",
        py::overload_cast<const ComplexVector&, double>(&quantize_1bit),
        py::arg("b"), py::arg("eta"));
  m.def("quantize_1bit_batch",
        py::overload_cast<const ComplexMatrix&, double>(&quantize_1bit),
        py::arg("b"), py::arg("eta"));

  py::class_<LinearizedLink>(m, "LinearizedLink")
      .def_readonly("config", &LinearizedLink::config)
      .def_readonly("h", &LinearizedLink::h)
      .def_property_readonly(
          "w", [](const LinearizedLink& l) { return l.precoder.w; })
      .def_property_readonly(
          "c_x", [](const LinearizedLink& l) { return l.precoder.c_x; })
      .def_property_readonly(
          "g_tx", [](const LinearizedLink& l) { return l.tx.g_tx; })
      .def_property_readonly(
          "c_t", [](const LinearizedLink& l) { return l.tx.c_t; })
      .def_property_readonly(
          "c_y", [](const LinearizedLink& l) { return l.rx.c_y; })
      .def_property_readonly(
          "g_rx", [](const LinearizedLink& l) { return l.rx.g_rx; })
      .def_property_readonly(
          "c_r", [](const LinearizedLink& l) { return l.rx.c_r; })
      .def_property_readonly(
          "v", [](const LinearizedLink& l) { return l.combiner.v; });

  m.def(
      "linearize_link",
      [](const ComplexMatrix& h, const LinkConfig& cfg) {
        return linearize_link(h, cfg);
      },
      py::arg("h"), py::arg("config"),
      py::call_guard<py::gil_scoped_release>());

  // metrics
  py::class_<MseReport>(m, "MseReport")
      .def_readonly("eps_tilde", &MseReport::eps_tilde)
      .def_readonly("eps_mc", &MseReport::eps_mc)
      .def_readonly("eps_mc_stderr", &MseReport::eps_mc_stderr)
      .def_readonly("draws", &MseReport::draws);

  py::class_<SerReport>(m, "SerReport")
      .def_readonly("ser", &SerReport::ser)
      .def_readonly("symbol_count", &SerReport::symbol_count)
      .def_readonly("errors", &SerReport::errors)
      .def_readonly("per_stream_ser", &SerReport::per_stream_ser)
      .def_readonly("wilson_low", &SerReport::wilson_low)
      .def_readonly("wilson_high", &SerReport::wilson_high);

  m.def(
      "approximate_mse",
      [](const LinearizedLink& link) {
        return approximate_mse(link.combiner, link);
      },
      py::arg("link"));
  m.def(
      "approximate_mse_with",
      [](const LinearizedLink& link, const ComplexMatrix& v) {
        return approximate_mse(Combiner{v}, link);
      },
      py::arg("link"), py::arg("v"));
  m.def(
      "monte_carlo_mse",
      [](RngStream& symbols, RngStream& noise, const LinearizedLink& link,
         long draws, bool psk16) {
        return monte_carlo_mse(
            symbols, noise, link, link.combiner,
            psk16 ? Constellation::psk(16) : Constellation::gaussian(), draws);
      },
      py::arg("symbols"), py::arg("noise"), py::arg("link"), py::arg("draws"),
      py::arg("psk16") = false, py::call_guard<py::gil_scoped_release>());
  m.def(
      "mse_expansion_check",
      [](const LinearizedLink& link) {
        return mse_expansion_check(link, link.combiner);
      },
      py::arg("link"));
  m.def(
      "detect_psk",
      [](const ComplexVector& s_hat, int order) {
        return detect_psk(s_hat, Constellation::psk(order));
      },
      py::arg("s_hat"), py::arg("order") = 16);
  m.def(
      "estimate_ser",
      [](RngStream& symbols, RngStream& noise, const LinearizedLink& link,
         long symbol_draws, int order, bool gain_calibration,
         long scatter_limit) {
        SerOptions options;
        options.gain_calibration = gain_calibration;
        options.scatter_limit = scatter_limit;
        return estimate_ser(symbols, noise, link, link.combiner,
                            Constellation::psk(order), symbol_draws, options);
      },
      py::arg("symbols"), py::arg("noise"), py::arg("link"),
      py::arg("symbol_draws"), py::arg("order") = 16,
      py::arg("gain_calibration") = false, py::arg("scatter_limit") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def("wilson_interval", &wilson_interval, py::arg("errors"),
        py::arg("trials"));

  // experiments
  m.def(
      "run_experiment",
      [](const std::string& spec_json) {
        ExperimentSpec spec = ExperimentSpec::from_json_text(spec_json);
        SweepResult result;
        {
          py::gil_scoped_release release;
          result = spec.kind == ExperimentKind::mse_vs_n_fixed_m
                       ? run_nm_symmetry_probe(spec)
                       : run_experiment(spec);
        }
        py::list rows;
        for (const auto& row : result.rows)
          rows.append(row_to_dict(row, spec));
        py::dict out;
        out["rows"] = rows;
        out["errors"] = result.errors;
        return out;
      },
      py::arg("spec_json"),
      "Run a sweep from a JSON spec string; returns rows as dicts. When the "
      "spec names an output-path the CSV is written as well.");
  m.def("thread_count", &thread_count);
}
