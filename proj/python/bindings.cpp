#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pwstab/elliptic.hpp"
#include "pwstab/errors.hpp"
#include "pwstab/evolution.hpp"
#include "pwstab/io.hpp"
#include "pwstab/linearized.hpp"
#include "pwstab/spectral.hpp"
#include "pwstab/symbols.hpp"
#include "pwstab/waves.hpp"

namespace py = pybind11;
using namespace pwstab;

namespace {

// JSON documents cross the boundary as their text form.
py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

}  // namespace

PYBIND11_MODULE(_pwstab, m) {
  m.doc() = "Periodic traveling waves and their orbital stability diagnostics";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<ShapeError>(m, "ShapeError", error);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", error);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", error);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error);
  py::register_exception<SingularityError>(m, "SingularityError", error);
  py::register_exception<NumericalError>(m, "NumericalError", error);
  py::register_exception<BlowUpError>(m, "BlowUpError", error);

  m.def("complete_elliptic_k", &complete_elliptic_k, py::arg("k"));
  m.def(
      "jacobi_elliptic",
      [](double u, double k) {
        const auto t = jacobi_elliptic(u, k);
        return py::make_tuple(t.sn, t.cn, t.dn);
      },
      py::arg("u"), py::arg("k"), "(sn, cn, dn)");
  m.def("theta_symbol", &theta_symbol, py::arg("xi"), py::arg("w"));

  py::class_<SystemSpec>(m, "SystemSpec")
      .def_static("kdv", &SystemSpec::kdv, py::arg("b"))
      .def_static("mkdv", &SystemSpec::mkdv, py::arg("d"))
      .def_static("logkdv", &SystemSpec::logkdv)
      .def_static("lkk", &SystemSpec::lkk, py::arg("w"))
      .def_property_readonly("kind", [](const SystemSpec& s) { return std::string(to_string(s.kind())); })
      .def_property_readonly("coefficients", &SystemSpec::coefficients)
      .def_property_readonly("depth_inverse", &SystemSpec::depth_inverse)
      .def_property_readonly("sobolev_index", &SystemSpec::sobolev_index)
      .def("potential", &SystemSpec::potential)
      .def("gradient", &SystemSpec::gradient)
      .def("__repr__", [](const SystemSpec& s) { return "SystemSpec(" + std::string(to_string(s.kind())) + ")"; });

  py::class_<CouplingReduction>(m, "CouplingReduction")
      .def_readonly("mu", &CouplingReduction::mu)
      .def_readonly("scale", &CouplingReduction::scale)
      .def_readonly("det", &CouplingReduction::det)
      .def_property_readonly("matrix", [](const CouplingReduction& r) {
        return std::array<std::array<double, 2>, 2>{{{r.matrix.a11, r.matrix.a12}, {r.matrix.a12, r.matrix.a22}}};
      });
  m.def(
      "coupling_roots",
      [](const SystemSpec& s) {
        const auto r = solve_coupling_cubic(s);
        return py::make_tuple(r.roots, r.all_mu);
      },
      py::arg("system"), "(real roots, relation holds for every mu)");
  m.def("coupling_reduction", &build_coupling_reduction, py::arg("system"), py::arg("mu"));
  m.def(
      "coupling_eigenvalues",
      [](const CouplingReduction& r) {
        const auto e = eigen_coupling(r);
        return py::make_tuple(e.lambda1, e.lambda2);
      },
      py::arg("reduction"));

  py::class_<WaveProfile>(m, "WaveProfile")
      .def_readonly("system", &WaveProfile::system)
      .def_readonly("length", &WaveProfile::length)
      .def_readonly("speed", &WaveProfile::speed)
      .def_readonly("a1", &WaveProfile::a1)
      .def_readonly("a2", &WaveProfile::a2)
      .def_readonly("mu", &WaveProfile::mu)
      .def_readonly("values", &WaveProfile::values)
      .def_readonly("params", &WaveProfile::params)
      .def_readonly("residual", &WaveProfile::residual)
      .def_property_readonly("size", &WaveProfile::size)
      .def("to_json", [](const WaveProfile& w) { return to_python(wave_to_json(w)); });

  m.def("build_cnoidal_wave",
        py::overload_cast<const SystemSpec&, double, double, double, int>(&build_cnoidal_wave),
        py::arg("system"), py::arg("mu"), py::arg("length"), py::arg("k"), py::arg("n") = 256);
  m.def("build_dnoidal_wave",
        py::overload_cast<const SystemSpec&, double, double, double, int>(&build_dnoidal_wave),
        py::arg("system"), py::arg("mu"), py::arg("length"), py::arg("k"), py::arg("n") = 256);
  m.def("build_logkdv_wave", &build_logkdv_wave, py::arg("c"), py::arg("a"), py::arg("n") = 256,
        py::arg("amplitude") = 0.5);
  m.def("build_bo_wave", &build_bo_wave, py::arg("omega"), py::arg("length"), py::arg("n") = 256);
  m.def("continue_lkk_wave", &continue_lkk_wave, py::arg("omega"), py::arg("w"), py::arg("initial"));
  m.def("equation_residual", &equation_residual, py::arg("wave"));

  m.def(
      "linearized_operator", [](const WaveProfile& w) { return assemble_operator(w).matrix; },
      py::arg("wave"), "Dense 2N x 2N matrix, component 1 first");
  m.def(
      "check_h1", [](const WaveProfile& w) { return to_python(report_to_json(check_h1(assemble_operator(w)))); },
      py::arg("wave"));
  m.def(
      "check_h2_kdv",
      [](const SystemSpec& s, double mu, double length, double k, int n) {
        return to_python(report_to_json(build_phi_kdv(s, mu, length, k, n)));
      },
      py::arg("system"), py::arg("mu"), py::arg("length"), py::arg("k"), py::arg("n") = 256);
  m.def(
      "check_h2_mkdv",
      [](const SystemSpec& s, double mu, double length, double k, int n) {
        return to_python(report_to_json(build_phi_mkdv(s, mu, length, k, n)));
      },
      py::arg("system"), py::arg("mu"), py::arg("length"), py::arg("k"), py::arg("n") = 256);
  m.def(
      "check_h2_logkdv",
      [](double c, double a, int n, double amplitude) {
        return to_python(report_to_json(check_h2_logkdv(c, a, 1e-3, n, amplitude)));
      },
      py::arg("c"), py::arg("a"), py::arg("n") = 256, py::arg("amplitude") = 0.5);
  m.def(
      "check_h2_lkk",
      [](double omega, double w, double length, int n) {
        return to_python(report_to_json(check_h2_lkk(omega, w, length, 1e-3, n)));
      },
      py::arg("omega"), py::arg("w"), py::arg("length"), py::arg("n") = 256);

  m.def(
      "conserved_quantities",
      [](const Field2& u, const SystemSpec& s, double length) {
        const auto q = conserved_quantities(u, s, length);
        return py::make_tuple(q.energy, q.momentum, q.mass);
      },
      py::arg("u"), py::arg("system"), py::arg("length"), "(E, F, M)");
  m.def("orbital_distance", &orbital_distance, py::arg("u"), py::arg("v"), py::arg("s"),
        py::arg("length"));

  py::class_<StabilityConfig>(m, "StabilityConfig")
      .def(py::init<>())
      .def_readwrite("delta", &StabilityConfig::delta)
      .def_readwrite("horizon", &StabilityConfig::horizon)
      .def_readwrite("dt", &StabilityConfig::dt)
      .def_readwrite("seed", &StabilityConfig::seed)
      .def_readwrite("k_ratio", &StabilityConfig::k_ratio)
      .def_readwrite("cfl", &StabilityConfig::cfl)
      .def_readwrite("record_every", &StabilityConfig::record_every);
  m.def(
      "stability_experiment",
      [](const WaveProfile& w, const StabilityConfig& cfg) {
        StabilityResult r;
        {
          py::gil_scoped_release release;
          r = stability_experiment(w, cfg);
        }
        py::dict out = to_python(stability_to_json(r));
        py::list rows;
        for (const auto& h : r.history) rows.append(py::make_tuple(h.t, h.energy, h.momentum, h.mass, h.rho));
        out["history"] = rows;
        out["final_state"] = r.final_state;
        return out;
      },
      py::arg("wave"), py::arg("config") = StabilityConfig{});
}
