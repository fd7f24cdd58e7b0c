#include "fsteta/errors.hpp"
#include "fsteta/study.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fsteta;

namespace {

TableFormat parse_format(const std::string &name) {
  if (name == "csv")
    return TableFormat::csv;
  if (name == "md" || name == "markdown")
    return TableFormat::markdown;
  throw UsageError("format must be 'csv' or 'md', got '" + name + "'");
}

VariantSelection parse_variant(const std::string &name) {
  if (name == "two")
    return VariantSelection::two;
  if (name == "three")
    return VariantSelection::three;
  if (name == "both")
    return VariantSelection::both;
  throw UsageError("variant must be 'two', 'three' or 'both', got '" + name + "'");
}

} // namespace

PYBIND11_MODULE(_fsteta, m) {
  m.doc() = "Fractional-step theta scheme for the heat equation with a posteriori estimators";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Mesh>(m, "Mesh")
      .def_static("uniform", &Mesh::uniform, py::arg("level"))
      .def_property_readonly("level", &Mesh::level)
      .def_property_readonly("cells_per_side", &Mesh::cells_per_side)
      .def_property_readonly("spacing", &Mesh::spacing)
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_property_readonly("num_dofs", &Mesh::num_dofs)
      .def_property_readonly("num_interior_facets",
                             [](const Mesh &mesh) { return mesh.interior_facets().size(); })
      .def_property_readonly("max_diameter", &Mesh::max_diameter)
      .def_property_readonly("vertices",
                             [](const Mesh &mesh) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto &p : mesh.vertices())
                                 out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def_property_readonly("triangles", &Mesh::triangles)
      .def("__repr__", [](const Mesh &mesh) {
        return "<Mesh level=" + std::to_string(mesh.level()) +
               " triangles=" + std::to_string(mesh.num_triangles()) + ">";
      });

  m.def("default_theta", &default_theta);
  m.def("default_alpha", &default_alpha, py::arg("theta"));
  m.def("quadrature_exactness_check", &quadrature_exactness_check, py::arg("alpha"),
        py::arg("theta") = default_theta());
  m.def(
      "eoc",
      [](const std::vector<double> &values, const std::vector<double> &h) { return eoc(values, h); },
      py::arg("values"), py::arg("h"));

  py::class_<CaseSpec>(m, "Case")
      .def_readonly("case_id", &CaseSpec::case_id)
      .def_readonly("description", &CaseSpec::description)
      .def("u", [](const CaseSpec &c, double x, double y, double t) { return c.exact_u(x, y, t); },
           py::arg("x"), py::arg("y"), py::arg("t"))
      .def("f", [](const CaseSpec &c, double x, double y, double t) { return c.forcing(x, y, t); },
           py::arg("x"), py::arg("y"), py::arg("t"))
      .def("__repr__", [](const CaseSpec &c) {
        return "<Case " + std::to_string(c.case_id) + ": " + c.description + ">";
      });
  m.def("make_case", &make_case, py::arg("case_id"));
  m.def("zero_case", &zero_case);

  py::class_<EstimatorConstants>(m, "EstimatorConstants")
      .def(py::init<>())
      .def_readwrite("c1", &EstimatorConstants::c1)
      .def_readwrite("c11", &EstimatorConstants::c11)
      .def_readwrite("C11", &EstimatorConstants::C11)
      .def_readwrite("C12", &EstimatorConstants::C12)
      .def_readwrite("C22", &EstimatorConstants::C22)
      .def("set", &EstimatorConstants::set, py::arg("name"), py::arg("value"));

  py::class_<StudyOptions>(m, "StudyOptions")
      .def(py::init<>())
      .def_readwrite("final_time", &StudyOptions::final_time)
      .def_readwrite("theta", &StudyOptions::theta)
      .def_readwrite("alpha1", &StudyOptions::alpha1)
      .def_readwrite("alpha2", &StudyOptions::alpha2)
      .def_readwrite("constants", &StudyOptions::constants)
      .def_readwrite("solver_tolerance", &StudyOptions::solver_tolerance);

  auto row = py::class_<EstimatorRow>(m, "EstimatorRow");
  row.def_readonly("m", &EstimatorRow::m).def_readonly("t", &EstimatorRow::t);
#define FSTETA_FIELD(name) row.def_readonly(#name, &EstimatorRow::name)
  FSTETA_FIELD(E_T1_two);
  FSTETA_FIELD(E_T1_three);
  FSTETA_FIELD(E_T2);
  FSTETA_FIELD(E_T3);
  FSTETA_FIELD(E_S1_two);
  FSTETA_FIELD(E_S1_three);
  FSTETA_FIELD(E_S2);
  FSTETA_FIELD(E_C);
  FSTETA_FIELD(E_D1);
  FSTETA_FIELD(E_D2);
  FSTETA_FIELD(E_ell);
  FSTETA_FIELD(E_rec_two);
  FSTETA_FIELD(E_rec_three);
  FSTETA_FIELD(E_m1);
  FSTETA_FIELD(total_two);
  FSTETA_FIELD(total_three);
  FSTETA_FIELD(bound_two);
  FSTETA_FIELD(bound_three);
#undef FSTETA_FIELD

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("level", &RunReport::level)
      .def_readonly("h", &RunReport::h)
      .def_readonly("diameter", &RunReport::diameter)
      .def_readonly("k", &RunReport::k)
      .def_readonly("steps", &RunReport::steps)
      .def_readonly("max_nodal_l2_error", &RunReport::max_nodal_l2_error)
      .def_readonly("e_total", &RunReport::e_total)
      .def_readonly("estimators", &RunReport::estimators)
      .def_readonly("history", &RunReport::history)
      .def_readonly("nodal_l2_errors", &RunReport::nodal_l2_errors)
      .def_readonly("effectivity_two", &RunReport::effectivity_two)
      .def_readonly("effectivity_three", &RunReport::effectivity_three)
      .def_readonly("max_compact_residual", &RunReport::max_compact_residual);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("detail", &CheckResult::detail);

  m.def("run_level", &run_level, py::arg("case"), py::arg("level"),
        py::arg("options") = StudyOptions{}, py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_study",
      [](const CaseSpec &c, int level_min, int level_max, const StudyOptions &options) {
        py::gil_scoped_release release;
        return run_study(c, level_min, level_max, options);
      },
      py::arg("case"), py::arg("level_min"), py::arg("level_max"),
      py::arg("options") = StudyOptions{});
  m.def(
      "render_tables",
      [](const std::vector<RunReport> &reports, const std::string &format,
         const std::string &variant) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto &table : build_tables(reports, parse_variant(variant)))
          out.emplace_back(table.name, render(table, parse_format(format)));
        return out;
      },
      py::arg("reports"), py::arg("format") = "csv", py::arg("variant") = "both");
  m.def(
      "emit",
      [](const std::vector<RunReport> &reports, const std::string &out_dir,
         const std::string &format, const std::string &variant) {
        emit(reports, parse_format(format), out_dir, parse_variant(variant));
      },
      py::arg("reports"), py::arg("out_dir"), py::arg("format") = "csv",
      py::arg("variant") = "both");
  m.def("check_reports", &check_reports, py::arg("reports"), py::arg("case_id"));
}
