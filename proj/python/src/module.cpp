#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "imcflab/common.hpp"
#include "imcflab/config.hpp"
#include "imcflab/diagnostics.hpp"
#include "imcflab/distance.hpp"
#include "imcflab/estimators.hpp"
#include "imcflab/experiment.hpp"
#include "imcflab/field.hpp"
#include "imcflab/geodesic.hpp"
#include "imcflab/leaf.hpp"
#include "imcflab/profile.hpp"

namespace py = pybind11;
using namespace imcf;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

// H reshaped to (n_t, n_theta, n_phi).
py::array_t<double> H_array(const AnnulusField& f) {
  py::array_t<double> a({f.time.n_t, f.sphere.n_theta, f.sphere.n_phi});
  std::copy(f.H.begin(), f.H.end(), a.mutable_data());
  return a;
}

AnnulusField family_field(const FamilyParams& p, double T, const GridSpec& g) {
  return reparam_to_imcf_time(make_profile_for_time(p, T), T, g);
}

py::dict row_dict(const MemberRow& r, const ConvergenceReport& rep) {
  py::dict d;
  d["index"] = r.index;
  d["parameter"] = r.parameter;
  d["status"] = r.status;
  d["hawking_mass_T"] = r.hawking_mass_T;
  d["uniform_distance"] = r.uniform_distance;
  d["l2_metric_gap"] = r.l2_metric_gap;
  d["sup_metric_gap"] = r.sup_metric_gap;
  py::dict gaps;
  for (size_t q = 0; q < rep.gap_names.size() && q < r.gotozero_gaps.size(); ++q)
    gaps[py::str(rep.gap_names[q])] = r.gotozero_gaps[q];
  d["gotozero_gaps"] = gaps;
  d["swif_excision"] = r.swif_excision;
  d["swif_by_k"] = r.swif_by_k;
  d["class_ok"] = r.class_ok;
  d["scalar_nonneg"] = r.scalar_nonneg;
  d["shooting_exact"] = r.shooting_exact;
  return d;
}

}  // namespace

PYBIND11_MODULE(_imcflab, m) {
  m.doc() = "Inverse mean curvature flow annuli: fields, distances, diagnostics";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int a, int b, int c) { return GridSpec{a, b, c}; }), py::arg("n_theta") = 64,
           py::arg("n_phi") = 128, py::arg("n_t") = 256)
      .def_readwrite("n_theta", &GridSpec::n_theta)
      .def_readwrite("n_phi", &GridSpec::n_phi)
      .def_readwrite("n_t", &GridSpec::n_t)
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(" + std::to_string(g.n_theta) + ", " + std::to_string(g.n_phi) + ", " +
               std::to_string(g.n_t) + ")";
      });

  py::enum_<FamilyKind>(m, "FamilyKind")
      .value("flat", FamilyKind::flat)
      .value("schwarzschild", FamilyKind::schwarzschild)
      .value("gravity_well", FamilyKind::gravity_well)
      .value("custom", FamilyKind::custom);

  py::class_<FamilyParams>(m, "FamilyParams")
      .def(py::init<>())
      .def_readwrite("kind", &FamilyParams::kind)
      .def_readwrite("r0", &FamilyParams::r0)
      .def_readwrite("m", &FamilyParams::m)
      .def_readwrite("well_depth", &FamilyParams::well_depth)
      .def_readwrite("well_width", &FamilyParams::well_width)
      .def_readwrite("well_start", &FamilyParams::well_start)
      .def_readwrite("well_recovery", &FamilyParams::well_recovery)
      .def_readwrite("well_recovery_width", &FamilyParams::well_recovery_width);

  py::class_<AnnulusField>(m, "AnnulusField")
      .def_property_readonly("r0", [](const AnnulusField& f) { return f.r0; })
      .def_property_readonly("T", [](const AnnulusField& f) { return f.time.T; })
      .def_property_readonly("grid", &AnnulusField::grid_spec)
      .def_property_readonly("rotsym", [](const AnnulusField& f) { return f.rotsym; })
      .def_property_readonly("label", [](const AnnulusField& f) { return f.label; })
      .def_property_readonly("H", &H_array)
      .def("t", [](const AnnulusField& f, int k) { return f.time.t(k); });

  m.def("build_delta", &build_delta, py::arg("r0"), py::arg("T"), py::arg("grid") = GridSpec{});
  m.def("family_field", &family_field, py::arg("params"), py::arg("T"), py::arg("grid") = GridSpec{},
        "Rotationally symmetric family reparametrized to flow time.");
  m.def("save_field", &save_field);
  m.def("load_field", &load_field);

  m.def("hawking_mass", &hawking_mass, py::arg("field"), py::arg("k"));
  m.def("leaf_area", &leaf_area, py::arg("field"), py::arg("k"));
  m.def("euler_characteristic", &euler_characteristic, py::arg("field"), py::arg("k"));
  m.def("hawking_mass_profile", [](const FamilyParams& p, double s_max) {
    return to_array(hawking_mass_profile(make_profile(p, s_max)));
  });
  m.def("l2_metric_gap", &l2_metric_gap);
  m.def("sup_metric_gap", &sup_metric_gap);

  m.def(
      "gotozero_gaps",
      [](const FamilyParams& p, double T, const GridSpec& g) {
        const RotSymProfile pr = make_profile_for_time(p, T);
        const AnnulusField f = reparam_to_imcf_time(pr, T, g);
        const auto gaps = gotozero_report(f, curvature_from_profile(f, pr)).max_gaps();
        py::dict d;
        for (size_t q = 0; q < gaps.size(); ++q) d[py::str(GoToZeroReport::names()[q])] = gaps[q];
        return d;
      },
      py::arg("params"), py::arg("T"), py::arg("grid") = GridSpec{});

  m.def(
      "distance",
      [](const AnnulusField& f, std::array<double, 3> p, std::array<double, 3> q) {
        const ShootResult r =
            shoot_distance(f, {p[0], p[1], p[2]}, {q[0], q[1], q[2]});
        py::dict d;
        d["distance"] = r.distance;
        d["method"] = r.method;
        d["fallback"] = r.fallback;
        d["local_min"] = r.local_min;
        return d;
      },
      py::arg("field"), py::arg("p"), py::arg("q"), "Distance between (t, theta, phi) points.");
  m.def(
      "uniform_distance",
      [](const AnnulusField& a, const AnnulusField& b, int n_dirs, int n_levels) {
        std::vector<double> lv;
        for (int l = 0; l < n_levels; ++l)
          lv.push_back(n_levels == 1 ? 0.0 : a.time.T * l / (n_levels - 1));
        const auto pts = fibonacci_points(n_dirs, lv);
        return uniform_distance(shooting_sample(a, pts), shooting_sample(b, pts)).value;
      },
      py::arg("a"), py::arg("b"), py::arg("n_dirs") = 12, py::arg("n_levels") = 5);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("name", &ExperimentConfig::name)
      .def_readwrite("family", &ExperimentConfig::family)
      .def_readwrite("T", &ExperimentConfig::T)
      .def_readwrite("grid", &ExperimentConfig::grid)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("jobs", &ExperimentConfig::jobs)
      .def_readwrite("random_points", &ExperimentConfig::random_points)
      .def_property(
          "members", [](const ExperimentConfig& c) { return c.sequence.members; },
          [](ExperimentConfig& c, int n) { c.sequence.members = n; })
      .def("to_ini", &to_ini);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("name", &ConvergenceReport::name)
      .def_readonly("seed", &ConvergenceReport::seed)
      .def_readonly("gap_names", &ConvergenceReport::gap_names)
      .def_property_readonly("rows",
                             [](const ConvergenceReport& r) {
                               py::list out;
                               for (const auto& row : r.rows) out.append(row_dict(row, r));
                               return out;
                             })
      .def("all_ok", &ConvergenceReport::all_ok)
      .def("csv", &report_csv)
      .def("json", &report_json)
      .def("__eq__", [](const ConvergenceReport& a, const ConvergenceReport& b) { return a == b; });
  m.def("run_sequence", &run_sequence, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("report_from_json", &report_from_json);
}
