#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ltforge/checks.hpp"

namespace py = pybind11;
using namespace ltforge;

namespace {

Field field_of(const std::string& name) { return preset(name); }

LTModule module_of(const std::string& name, const std::string& coordinate, int precision) {
  return LTModule(field_of(name), parse_coordinate(coordinate), precision);
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_ltforge, m) {
  m.doc() = "Lubin-Tate formal groups, characteristic p dynamics and Frobenius lifts (JSON in, JSON out)";
  py::register_exception<Error>(m, "LtforgeError", PyExc_ValueError);

  m.def("preset_names", &preset_names);
  m.def("field", [](const std::string& name) { return dump(field_of(name)->to_json()); }, py::arg("preset"));

  m.def(
      "pi_series",
      [](const std::string& name, const std::string& coordinate, int precision, int order) {
        return dump(to_json(module_of(name, coordinate, precision).pi_series(order)));
      },
      py::arg("preset"), py::arg("coordinate") = "polynomial", py::arg("precision") = 8, py::arg("order") = 16);

  m.def(
      "a_series",
      [](const std::string& name, std::int64_t a, const std::string& coordinate, int precision, int order) {
        const LTModule M = module_of(name, coordinate, precision);
        return dump(to_json(M.a_series(OFElement::from_int(M.field(), a, M.input_precision(order)), order)));
      },
      py::arg("preset"), py::arg("a"), py::arg("coordinate") = "polynomial", py::arg("precision") = 8, py::arg("order") = 16);

  m.def(
      "group_law",
      [](const std::string& name, const std::string& coordinate, int precision, int order) {
        return dump(to_json(module_of(name, coordinate, precision).group_law(order)));
      },
      py::arg("preset"), py::arg("coordinate") = "polynomial", py::arg("precision") = 8, py::arg("order") = 16);

  m.def(
      "log_series",
      [](const std::string& name, const std::string& coordinate, int precision, int order) {
        return dump(to_json(module_of(name, coordinate, precision).log(order)));
      },
      py::arg("preset"), py::arg("coordinate") = "polynomial", py::arg("precision") = 8, py::arg("order") = 16);

  m.def(
      "planted_series",
      [](const std::string& name, std::int64_t a, int depth, int order) {
        const LTModule M = module_of(name, "polynomial", 8);
        const OFElement g = OFElement::from_int(M.field(), a, M.residue_module().input_precision(order));
        return dump(to_json(PerfSeries(depth, M.reduced_endomorphism(g, order))));
      },
      py::arg("preset"), py::arg("a"), py::arg("depth") = 0, py::arg("order") = 64,
      "[a] mod pi as a perfectoid series at the given depth");

  m.def(
      "colmez_lift",
      [](const std::string& name, const std::string& u, int precision, const std::string& coordinate) {
        const LTModule M = module_of(name, coordinate, precision);
        const PerfSeries s = perf_series_from_json(M.field(), nlohmann::json::parse(u));
        py::gil_scoped_release release;
        return dump(to_json(colmez_lift(M, s, precision, s.order())));
      },
      py::arg("preset"), py::arg("u"), py::arg("precision") = 8, py::arg("coordinate") = "polynomial");

  m.def(
      "recover_a",
      [](const std::string& name, const std::string& u, int precision, const std::string& coordinate) {
        const LTModule M = module_of(name, coordinate, precision);
        const PerfSeries s = perf_series_from_json(M.field(), nlohmann::json::parse(u));
        py::gil_scoped_release release;
        return dump(to_json(recover_a(M, s, precision)));
      },
      py::arg("preset"), py::arg("u"), py::arg("precision") = 8, py::arg("coordinate") = "polynomial");

  m.def(
      "run_checks",
      [](const std::string& name, const std::vector<std::string>& names, const std::string& coordinate, int precision,
         int order, int samples, std::uint64_t seed) {
        CheckConfig cfg{field_of(name), parse_coordinate(coordinate), precision, order, samples, seed};
        std::vector<CheckOutcome> out;
        {
          py::gil_scoped_release release;
          out = run_checks(cfg, names);
        }
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : out) arr.push_back(to_json(c));
        return dump(arr);
      },
      py::arg("preset"), py::arg("names") = std::vector<std::string>{}, py::arg("coordinate") = "polynomial",
      py::arg("precision") = 8, py::arg("order") = 64, py::arg("samples") = 10, py::arg("seed") = 1);
}
