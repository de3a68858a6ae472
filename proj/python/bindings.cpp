#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include "normsol/energy.hpp"
#include "normsol/errors.hpp"
#include "normsol/experiments.hpp"
#include "normsol/exponents.hpp"
#include "normsol/groundstate.hpp"
#include "normsol/solver.hpp"

namespace py = pybind11;
using namespace normsol;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }
py::array_t<double> to_array(std::span<const double> v) { return py::array_t<double>(v.size(), v.data()); }

RadialField field_from(int N, double r_max, py::array_t<double, py::array::c_style | py::array::forcecast> u) {
  const GridPtr g = make_grid(N, r_max, static_cast<std::size_t>(u.size()));
  return RadialField(g, std::vector<double>(u.data(), u.data() + u.size()));
}

py::dict breakdown_dict(const EnergyBreakdown& b) {
  py::dict d;
  d["I"] = b.total;
  d["kin2"] = b.kin2;
  d["kinq"] = b.kinq;
  d["pot"] = b.pot;
  d["mass2"] = b.mass2;
  d["P"] = b.pohozaev;
  d["lambda_general"] = b.lambda_general;
  d["lambda_pohozaev"] = b.lambda_pohozaev;
  return d;
}

py::dict norms_dict(const FieldNorms& n) {
  py::dict d;
  d["mass2"] = n.mass2;
  d["grad2"] = n.grad2;
  d["gradq"] = n.gradq;
  d["lp"] = n.lp;
  return d;
}

py::dict solve(const ProblemParams& pp, double r_max, std::size_t grid_m, double tol, int max_iters) {
  const GridPtr g = sweep_grid(pp, r_max, grid_m);
  SolveConfig cfg;
  cfg.tol_grad = tol;
  cfg.max_iters = max_iters;
  const Regime reg = classify_regime(pp).regime;
  SolveResult r;
  {
    py::gil_scoped_release release;
    r = reg == Regime::Supercritical ? minimize_pohozaev(pp, g, cfg) : minimize_global(pp, g, cfg);
  }
  py::dict d;
  d["r"] = to_array(g->nodes());
  d["u"] = to_array(r.u.values);
  d["level"] = r.level;
  d["lambda"] = r.lambda;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["grad_norm"] = r.grad_norm;
  d["residual"] = r.residual;
  d["breakdown"] = breakdown_dict(r.breakdown);
  d["message"] = r.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_normsol, m) {
  m.doc() = "Normalized solutions of the mixed Laplacian/q-Laplacian Schrödinger equation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
  py::register_exception<DependencyError>(m, "DependencyError", base.ptr());
  py::register_exception<ShootingError>(m, "ShootingError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<NormalizationError>(m, "NormalizationError", base.ptr());
  py::register_exception<DegenerateFiberError>(m, "DegenerateFiberError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<ProblemParams>(m, "ProblemParams")
      .def(py::init([](int N, double q, double p, double c) { return ProblemParams{N, q, p, c}; }), py::arg("N"),
           py::arg("q"), py::arg("p"), py::arg("c") = 1.0)
      .def_readwrite("N", &ProblemParams::N)
      .def_readwrite("q", &ProblemParams::q)
      .def_readwrite("p", &ProblemParams::p)
      .def_readwrite("c", &ProblemParams::c)
      .def("__repr__", [](const ProblemParams& p) {
        return "ProblemParams(N=" + std::to_string(p.N) + ", q=" + py::repr(py::float_(p.q)).cast<std::string>() +
               ", p=" + py::repr(py::float_(p.p)).cast<std::string>() +
               ", c=" + py::repr(py::float_(p.c)).cast<std::string>() + ")";
      });

  m.def("validate", &validate, py::arg("params"));
  m.def("classify_regime", [](const ProblemParams& pp) {
    const RegimeReport r = classify_regime(pp);
    py::dict d;
    d["regime"] = to_string(r.regime);
    d["satisfied_conditions"] = r.satisfied_conditions;
    d["predicted_exponents"] = r.predicted_exponents;
    return d;
  }, py::arg("params"));
  m.def("derive_exponents", [](const ProblemParams& pp) {
    const DerivedExponents e = derive_exponents(pp);
    py::dict d;
    d["delta_p"] = e.delta_p;
    d["delta_q"] = e.delta_q;
    d["nu_pq"] = e.nu_pq;
    d["pbar"] = e.pbar;
    d["phat"] = e.phat;
    return d;
  }, py::arg("params"));

  m.def("grid_nodes", [](int N, double r_max, std::size_t M) { return to_array(make_grid(N, r_max, M)->nodes()); },
        py::arg("N"), py::arg("r_max"), py::arg("M"));
  m.def("norms", [](int N, double r_max, py::array_t<double, py::array::c_style | py::array::forcecast> u, double q,
                    double p) { return norms_dict(norms(field_from(N, r_max, u), q, p)); },
        py::arg("N"), py::arg("r_max"), py::arg("u"), py::arg("q"), py::arg("p"),
        "Norms of a field sampled on the uniform grid over [0, r_max].");
  m.def("energy", [](const ProblemParams& pp, double r_max, py::array_t<double, py::array::c_style | py::array::forcecast> u) {
    return breakdown_dict(evaluate(field_from(pp.N, r_max, u), pp));
  }, py::arg("params"), py::arg("r_max"), py::arg("u"));
  m.def("gradient", [](const ProblemParams& pp, double r_max, py::array_t<double, py::array::c_style | py::array::forcecast> u,
                       double eps_reg) { return to_array(gradient(field_from(pp.N, r_max, u), pp, eps_reg).values); },
        py::arg("params"), py::arg("r_max"), py::arg("u"), py::arg("eps_reg") = 0.0);

  m.def("fiber_t0", [](double A, double B, double C, const ProblemParams& pp) {
    return find_t0(fiber_coeffs(A, B, C, pp), pp);
  }, py::arg("A"), py::arg("B"), py::arg("C"), py::arg("params"));
  m.def("fiber_h", [](double t, double A, double B, double C, const ProblemParams& pp) {
    return fiber_h(t, fiber_coeffs(A, B, C, pp));
  }, py::arg("t"), py::arg("A"), py::arg("B"), py::arg("C"), py::arg("params"));

  m.def("solve_wp", [](int N, double p, double q) {
    const ExtremalProfile w = solve_wp(N, p, wp_grid(N, p), q);
    py::dict d;
    d["r"] = to_array(w.field.grid->nodes());
    d["W"] = to_array(w.field.values);
    d["norms"] = norms_dict(w.norms);
    d["shoot_value"] = w.shoot_value;
    d["ode_residual"] = w.ode_residual;
    d["converged"] = w.converged;
    return d;
  }, py::arg("N"), py::arg("p"), py::arg("q") = 2.0);
  m.def("solve_wpq", [](int N, double p, double q) {
    const ExtremalProfile w = solve_wpq(N, p, q, wpq_grid(N, p, q));
    py::dict d;
    d["r"] = to_array(w.field.grid->nodes());
    d["W"] = to_array(w.field.values);
    d["norms"] = norms_dict(w.norms);
    d["zeta"] = w.zeta;
    d["ode_residual"] = w.ode_residual;
    d["converged"] = w.converged;
    return d;
  }, py::arg("N"), py::arg("p"), py::arg("q"));
  m.def("critical_masses", [](const ProblemParams& pp) {
    const ExtremalProfile wp = solve_wp(pp.N, pp.p, wp_grid(pp.N, pp.p), pp.q);
    const ExtremalNorms wn = wp.bundle();
    CriticalMasses cm;
    if (classify_regime(pp).regime == Regime::LqCritical) {
      const ExtremalNorms qn = solve_wpq(pp.N, pp.p, pp.q, wpq_grid(pp.N, pp.p, pp.q)).bundle();
      cm = critical_masses(pp, &wn, &qn);
    } else {
      cm = critical_masses(pp, &wn, nullptr);
    }
    py::dict d;
    d["c_star"] = cm.c_star ? py::object(py::float_(*cm.c_star)) : py::object(py::none());
    d["c_2star"] = cm.c_2star ? py::object(py::float_(*cm.c_2star)) : py::object(py::none());
    d["chat_2star"] = cm.chat_2star ? py::object(py::float_(*cm.chat_2star)) : py::object(py::none());
    return d;
  }, py::arg("params"));

  m.def("solve", &solve, py::arg("params"), py::arg("r_max") = 0.0, py::arg("grid_m") = 2000,
        py::arg("tol") = 1e-6, py::arg("max_iters") = 4000,
        "Ground state of mass params.c; r_max = 0 picks the radius from the length scale.");
  m.def("suggest_radius", &suggest_radius, py::arg("params"));
  m.def("sweep", [](const ProblemParams& pp, const std::vector<double>& c_list, double r_max, std::size_t grid_m) {
    SweepOptions opt;
    opt.r_max = r_max;
    opt.grid_m = grid_m;
    SweepResult s;
    {
      py::gil_scoped_release release;
      s = run_sweep(pp, c_list, opt);
    }
    return py::module_::import("json").attr("loads")(sweep_json(pp, s));
  }, py::arg("params"), py::arg("c_list"), py::arg("r_max") = 0.0, py::arg("grid_m") = 2000);
}
