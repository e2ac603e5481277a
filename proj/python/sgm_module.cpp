// Python bindings: scenarios in, JSON documents out (as Python objects)
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgm/properties.hpp"
#include "sgm/store.hpp"

namespace py = pybind11;
using namespace sgm;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::list reports(const std::vector<PropertyReport>& rs) {
  py::list out;
  for (auto& r : rs) {
    py::dict d;
    d["name"] = r.name;
    d["cases"] = r.cases;
    d["failures"] = r.failures;
    d["first_failure"] = r.first_failure;
    d["ok"] = r.ok();
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_sgm, m) {
  m.doc() = "Sigma invariants over CAT(0) models";
  // translators run newest first, so the subclass goes last
  auto base = py::register_exception<Error>(m, "SigmaError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("seed", &Scenario::seed)
      .def_property_readonly("digest", &Scenario::digest)
      .def_property_readonly("is_product", &Scenario::is_product)
      .def("to_json", [](const Scenario& s) { return to_py(s.to_json()); })
      .def(
          "sample_directions",
          [](const Scenario& s, int count, std::optional<uint64_t> seed) {
            std::vector<std::string> out;
            for (auto& e : sample_directions(*s.cm.M, count, seed.value_or(s.seed))) out.push_back(e.str());
            return out;
          },
          py::arg("count"), py::arg("seed") = py::none())
      .def(
          "member",
          [](const Scenario& s, const std::string& dir, const std::string& end, const std::string& join, int n) {
            Dir e = parse_direction(s, dir, end, join);
            Verdict v;
            {
              py::gil_scoped_release release;
              v = membership(s.cm, e, n, s.budgets);
            }
            json j = verdict_to_json(v);
            if (v.push) j["push"] = push_to_json(s.cm, *v.push);
            if (v.obstruction) j["obstruction"] = obstruction_to_json(s.cm, *v.obstruction_at, n, *v.obstruction);
            return to_py(j);
          },
          py::arg("dir") = "", py::arg("end") = "", py::arg("join") = "", py::arg("n") = 1)
      .def(
          "push",
          [](const Scenario& s, const std::string& dir, const std::string& end, const std::string& join,
             int n) -> py::object {
            Dir e = parse_direction(s, dir, end, join);
            std::optional<PushCertificate> c;
            {
              py::gil_scoped_release release;
              c = find_push(s.cm, e, n, s.budgets);
            }
            if (!c) return py::none();
            return to_py(push_to_json(s.cm, *c));
          },
          py::arg("dir") = "", py::arg("end") = "", py::arg("join") = "", py::arg("n") = 1);

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def(
      "parse_scenario",
      [](const std::string& text, const std::string& base_dir) { return parse_scenario(text, base_dir); },
      py::arg("text"), py::arg("base_dir") = ".");
  m.def(
      "verify_certificate",
      [](const py::object& doc) {
        std::string why;
        bool ok = verify_certificate(from_py(doc), &why);
        return py::make_tuple(ok, why);
      },
      py::arg("doc"));
  m.def(
      "verify_file",
      [](const std::string& path) {
        std::string why;
        bool ok = verify_file(path, &why);
        return py::make_tuple(ok, why);
      },
      py::arg("path"));
  m.def(
      "valuation_laws", [](size_t n, uint64_t seed) { return reports(valuation_laws(n, seed)); }, py::arg("per_family"),
      py::arg("seed") = 1);
  m.def(
      "shift_laws", [](size_t n, uint64_t seed) { return reports(shift_laws(n, seed)); }, py::arg("count"),
      py::arg("seed") = 1);
  m.def(
      "comparison_laws", [](size_t n, uint64_t seed) { return reports(comparison_laws(n, seed)); }, py::arg("pairs"),
      py::arg("seed") = 1);
  m.def(
      "novikov_laws", [](size_t n, uint64_t seed) { return reports(novikov_laws(n, seed)); }, py::arg("count"),
      py::arg("seed") = 1);
  m.attr("SCHEMA_VERSION") = kSchemaVersion;
}
