#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "focklab/approximation.hpp"
#include "focklab/fock_core.hpp"
#include "focklab/operators.hpp"
#include "runner.hpp"

namespace py = pybind11;
using namespace focklab;

namespace {

Symbol parse_symbol(const std::string& text) { return symbol_from_json(nlohmann::json::parse(text)); }

Point point1(Complex z) { return Point{z}; }

}  // namespace

PYBIND11_MODULE(_focklab, m) {
  m.doc() = "Toeplitz operators on Fock spaces: truncated numerics";

  py::register_exception<Error>(m, "FocklabError", PyExc_ValueError);
  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "basis_norm",
      [](const std::string& p, int k) { return basis_norm_1d(norm_exponent_from_string(p), k); },
      py::arg("p"), py::arg("k"), "||e_k|| in F^p at t = 1, n = 1 (p in '1', '2', 'inf').");

  m.def(
      "heat_transform",
      [](const std::string& symbol, double s, Complex z) { return heat_transform(parse_symbol(symbol), s, point1(z)).value; },
      py::arg("symbol"), py::arg("s"), py::arg("z"), "f^(s)(z) for a symbol given as JSON text (n = 1).");

  m.def(
      "toeplitz_matrix",
      [](const std::string& symbol, double t, int N) {
        return toeplitz_matrix(parse_symbol(symbol), MultiIndexBasis::make(t, 1, N)).entries();
      },
      py::arg("symbol"), py::arg("t"), py::arg("N"), "T_f on degrees <= N, entries <T_f e_k, e_j> at [j, k].");

  m.def(
      "berezin",
      [](const Eigen::MatrixXcd& a, double t, Complex z) {
        const BasisPtr basis = MultiIndexBasis::make(t, 1, static_cast<int>(a.rows()) - 1);
        return berezin(OperatorMatrix(basis, a), point1(z)).value;
      },
      py::arg("matrix"), py::arg("t"), py::arg("z"), "Berezin transform of a truncated matrix (n = 1).");

  m.def(
      "wiener_l1_error",
      [](double t, int N, const std::string& cacheDir) {
        WienerSearchParams params;
        params.cacheDir = cacheDir;
        const WienerApproximant w = wiener_coefficients(t, N, params);
        return py::make_tuple(w.l1Error, w.certified, w.coeffs.size());
      },
      py::arg("t"), py::arg("N"), py::arg("cache_dir") = "",
      "(certified L1 error, certified flag, number of translates) for g_{t/N} by translates of g_t.");

  m.def("list_suites", [] {
    std::vector<std::string> names;
    for (const cli::SuiteInfo& s : cli::suite_catalog()) names.push_back(s.name);
    return names;
  });

  m.def(
      "run_suite_json",
      [](const std::string& configJson) {
        const cli::Config config = cli::parse_config(nlohmann::json::parse(configJson));
        py::gil_scoped_release release;
        return cli::strip_timestamp(cli::run(config).report).dump();
      },
      py::arg("config"), "Runs a configuration given as JSON text and returns the report as JSON text.");
}
