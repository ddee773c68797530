#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hodm/blockchannel.hpp"
#include "hodm/capacity.hpp"
#include "hodm/config.hpp"
#include "hodm/experiments.hpp"
#include "hodm/modem.hpp"

namespace py = pybind11;
using hodm::Complex;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

hodm::ComplexGrid to_grid(const CArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  hodm::ComplexGrid g(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), g.data().begin());
  return g;
}

CArray to_array(const hodm::ComplexGrid& g) {
  CArray out({g.rows(), g.cols()});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

hodm::ExperimentConfig config_from(const std::string& text) {
  return text.empty() ? hodm::default_config() : hodm::parse_config(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "HODM channel, transform and capacity routines";

  py::register_exception<hodm::ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("experiment_names", &hodm::experiment_names);

  m.def("default_config_text", [] { return hodm::serialize_config(hodm::default_config()); });

  m.def(
      "normalize_config",
      [](const std::string& text) { return hodm::serialize_config(hodm::parse_config(text)); },
      py::arg("text"), "Parse and validate a configuration, returning its canonical text.");

  m.def(
      "run_experiment",
      [](const std::string& name, const std::string& config, unsigned threads) {
        hodm::CurveArtifact a;
        {
          py::gil_scoped_release release;
          a = hodm::run_experiment(name, config_from(config), threads);
        }
        py::list rows;
        for (const auto& r : a.rows) rows.append(py::make_tuple(r.x, r.series, r.y, r.std_error));
        return rows;
      },
      py::arg("name"), py::arg("config") = "", py::arg("threads") = 1,
      "Rows (x, series, y, stderr) of one experiment; empty config text means defaults.");

  m.def(
      "experiment_csv",
      [](const std::string& name, const std::string& config, unsigned threads) {
        py::gil_scoped_release release;
        return hodm::format_csv(hodm::run_experiment(name, config_from(config), threads));
      },
      py::arg("name"), py::arg("config") = "", py::arg("threads") = 1);

  m.def(
      "modulate",
      [](const CArray& symbols) {
        hodm::SymbolGrid s(static_cast<int>(symbols.shape(0)), static_cast<int>(symbols.shape(1)));
        s.values() = to_grid(symbols);
        return to_array(hodm::hodm_modulate(s).samples);
      },
      py::arg("symbols"), "Symbols s[l - min_mode, m] to element samples X[n, u].");

  m.def(
      "demodulate",
      [](const CArray& samples) {
        return to_array(hodm::hodm_demodulate({to_grid(samples), 0.0}).values());
      },
      py::arg("samples"));

  m.def(
      "los_block_gain",
      [](int num_elements, double radius_tx, double radius_rx, double axial_distance, int mode,
         double wavelength) {
        const hodm::UcaGeometry g{num_elements, radius_tx, radius_rx, axial_distance, 1.0};
        g.validate();
        return hodm::los_block_gain(g, mode, wavelength);
      },
      py::arg("num_elements"), py::arg("radius_tx"), py::arg("radius_rx"), py::arg("axial_distance"),
      py::arg("mode"), py::arg("wavelength"));

  m.def(
      "block_channel",
      [](const std::string& config, int num_elements, int num_subcarriers, int path_count) {
        const auto c = config_from(config);
        return to_array(hodm::experiment_channel(c, num_elements, num_subcarriers, path_count).total());
      },
      py::arg("config") = "", py::arg("num_elements") = 16, py::arg("num_subcarriers") = 16,
      py::arg("path_count") = 4, "h[l - min_mode, m] for the first path_count catalog paths.");

  m.def(
      "waterfill",
      [](const std::vector<double>& gain_to_noise, double budget) {
        const double w = hodm::find_water_level(gain_to_noise, budget);
        const auto r = hodm::waterfill(gain_to_noise, w);
        return py::make_tuple(r.powers, r.capacity, w);
      },
      py::arg("gain_to_noise"), py::arg("budget"), "Returns (powers, capacity in bits, water level).");
}
