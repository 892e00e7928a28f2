#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "prophet_lab/bounds.hpp"
#include "prophet_lab/cli.hpp"
#include "prophet_lab/dist_io.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/experiments.hpp"
#include "prophet_lab/finite_dist.hpp"
#include "prophet_lab/hardsearch.hpp"
#include "prophet_lab/stopping_dp.hpp"

namespace py = pybind11;
using namespace prophet;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"prophet_lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Prophet inequality toolkit: exact DP values, bounds and hard instances.";

  auto base = py::register_exception<std::invalid_argument>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<FiniteDist>(m, "FiniteDist")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("support"), py::arg("probs"))
      .def_static("point_mass", &FiniteDist::point_mass)
      .def_property_readonly("support", [](const FiniteDist& d) { return to_vec(d.support()); })
      .def_property_readonly("probs", [](const FiniteDist& d) { return to_vec(d.probs()); })
      .def("__len__", &FiniteDist::size)
      .def("__eq__", [](const FiniteDist& a, const FiniteDist& b) { return a == b; })
      .def("mean", [](const FiniteDist& d) { return mean(d); })
      .def("__repr__", [](const FiniteDist& d) {
        std::ostringstream s;
        s << "FiniteDist(" << d.size() << " atoms, max " << d.max_value() << ")";
        return s.str();
      });

  m.def("parse_dist", &parse_inline_dist, py::arg("spec"), "Parse an inline law like '0:0.5,1:0.5'.");
  m.def("max_power", &max_power, py::arg("d"), py::arg("k"));
  m.def("kth_root", &kth_root, py::arg("d"), py::arg("k"));
  m.def("zero_pad", &zero_pad, py::arg("d"), py::arg("p"));
  m.def("dilate", &dilate, py::arg("d"), py::arg("a"), py::arg("b"));

  m.def("gambler_values", [](const FiniteDist& d, std::size_t n) { return build_table(d, n).gambler_values; },
        py::arg("d"), py::arg("n"));
  m.def("thresholds", [](const FiniteDist& d, std::size_t n) { return build_table(d, n).thresholds; },
        py::arg("d"), py::arg("n"));
  m.def("prophet_value", &prophet_value, py::arg("d"), py::arg("k"));
  m.def("competitive_ratio", &competitive_ratio, py::arg("d"), py::arg("n"));
  m.def("batch_value", &batch_value, py::arg("d"), py::arg("n"), py::arg("b"));

  m.def("delta_gap", &delta_gap, py::arg("d_batchmax"), py::arg("k"));
  m.def("clean_upper_bound", py::overload_cast<std::size_t, std::size_t, double>(&clean_upper_bound),
        py::arg("k"), py::arg("l"), py::arg("alpha_l"));

  m.def("fast_ratio", [](const std::vector<double>& v, const std::vector<double>& p, std::size_t k) {
    return fast_ratio(v, p, k);
  }, py::arg("values"), py::arg("probs"), py::arg("k"));
  m.def("alpha_estimate", [](std::size_t k, std::size_t restarts, std::size_t iters, std::uint64_t seed) {
    const auto e = alpha_estimate(k, SearchBudget{restarts, iters, 33, seed});
    return py::make_tuple(e.alpha, e.witness);
  }, py::arg("k"), py::arg("restarts") = 3, py::arg("iters") = 2000, py::arg("seed") = 1,
     "Returns (alpha, witness law).");

  m.def("noniid_demo", [](double eps, std::size_t n, std::size_t w) {
    const auto r = noniid_demo(eps, n, w);
    return py::make_tuple(r.gambler, r.prophet, r.ratio);
  }, py::arg("eps"), py::arg("n"), py::arg("w"), "Returns (gambler, prophet, ratio).");

  m.def("run_cli", &run_cli, py::arg("args"), "Run the command line tool in-process; returns (code, stdout, stderr).");
}
