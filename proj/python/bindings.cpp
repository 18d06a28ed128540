// Python bindings: fields are numpy arrays, reports are dicts.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "centroflow/acceptance.hpp"
#include "centroflow/affine.hpp"
#include "centroflow/curve.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/io.hpp"
#include "centroflow/obstruction.hpp"
#include "centroflow/shapes.hpp"
#include "centroflow/solver.hpp"

namespace py = pybind11;
using namespace centroflow;

namespace {

py::array_t<double> to_array(std::span<const double> f) {
  py::array_t<double> out(static_cast<py::ssize_t>(f.size()));
  std::copy(f.begin(), f.end(), out.mutable_data());
  return out;
}

Field to_field(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
  return Field(a.data(), a.data() + a.size());
}

py::object from_json(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

LinearMap2 to_map(const py::object& m) {
  const auto rows = m.cast<std::vector<std::vector<double>>>();
  if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
    throw py::value_error("expected a 2x2 matrix");
  }
  return {rows[0][0], rows[0][1], rows[1][0], rows[1][1]};
}

py::dict critical_dict(const CriticalPoints& c) {
  py::dict d;
  d["degenerate"] = c.degenerate;
  d["count"] = c.count;
  d["weighted_count"] = c.weighted_count;
  d["locations"] = to_array(c.locations);
  d["tangential"] = to_array(c.tangential);
  return d;
}

py::dict trace_dict(const FlowTrace& trace) {
  py::dict d;
  d["termination"] = to_string(trace.termination);
  d["detail"] = trace.detail;
  const std::size_t n = trace.records.size();
  auto column = [&](auto member) {
    Field v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(trace.records[i].*member);
    return to_array(v);
  };
  d["step"] = column(&FlowRecord::step);
  d["t"] = column(&FlowRecord::t);
  d["tau"] = column(&FlowRecord::tau);
  d["area"] = column(&FlowRecord::area);
  d["length"] = column(&FlowRecord::length);
  d["omega_p_psi"] = column(&FlowRecord::omega_p_psi);
  d["ratio"] = column(&FlowRecord::ratio);
  d["min_speed"] = column(&FlowRecord::min_speed);
  d["residual_osc"] = column(&FlowRecord::residual_osc);
  d["aspect"] = column(&FlowRecord::aspect);
  d["dt"] = column(&FlowRecord::dt);
  if (trace.final_state) {
    d["final_s"] = to_array(trace.final_state->s.values());
    d["final_scale"] = trace.final_state->scale;
  }
  return d;
}

FlowConfig config_from(const py::dict& kwargs, FlowConfig base) {
  if (kwargs.empty()) return base;
  const py::object dumps = py::module_::import("json").attr("dumps");
  return flow_config_from_json(Json::parse(dumps(kwargs).cast<std::string>()), base);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Centro-affine curve flow and planar Minkowski problem solver";

  // translators registered later are tried first, so the base class goes first
  const py::object error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<NotACurve>(m, "NotACurve", error);
  py::register_exception<NotConvex>(m, "NotConvex", error);
  py::register_exception<InvalidMap>(m, "InvalidMap", error);
  py::register_exception<OutOfRange>(m, "OutOfRange", error);
  py::register_exception<InvalidGrid>(m, "InvalidGrid", error);
  py::register_exception<OriginHit>(m, "OriginHit", error);

  // curve
  m.def(
      "synthesize",
      [](double a0, std::vector<double> cos, std::vector<double> sin, int n) {
        FourierSpec spec{a0, std::move(cos), std::move(sin)};
        return to_array(synthesize(spec, n).values());
      },
      py::arg("a0") = 1.0, py::arg("cos") = std::vector<double>{}, py::arg("sin") = std::vector<double>{},
      py::arg("n") = 256, "Samples a0 + sum a_n cos 2n theta + b_n sin 2n theta as a support function.");
  m.def(
      "geometry",
      [](const py::array_t<double>& s) {
        const CurveGeometry g = geometry(SupportField::from_samples(to_field(s)));
        py::array_t<double> pts({static_cast<py::ssize_t>(g.boundary_points.size()), py::ssize_t{2}});
        auto w = pts.mutable_unchecked<2>();
        for (std::size_t i = 0; i < g.boundary_points.size(); ++i) {
          w(static_cast<py::ssize_t>(i), 0) = g.boundary_points[i][0];
          w(static_cast<py::ssize_t>(i), 1) = g.boundary_points[i][1];
        }
        py::dict d;
        d["radius_of_curvature"] = to_array(g.radius_of_curvature);
        d["curvature"] = to_array(g.curvature);
        d["boundary_points"] = pts;
        d["area"] = g.area;
        d["length"] = g.length;
        return d;
      },
      py::arg("s"));
  m.def(
      "spectral_derivative", [](const py::array_t<double>& f, int order) { return to_array(spectral_derivative(to_field(f), order)); },
      py::arg("f"), py::arg("order"));
  m.def(
      "apply_sl2",
      [](const py::array_t<double>& s, const py::object& t) {
        return to_array(apply_sl2(SupportField::from_samples(to_field(s)), to_map(t)).values());
      },
      py::arg("s"), py::arg("T"), "Support function of T(K) for T in SL(2) given as [[a, b], [c, d]].");
  m.def(
      "detect_periodicity",
      [](const py::array_t<double>& f) -> py::object {
        const int k = detect_periodicity(to_field(f));
        return k == kUnboundedPeriodicity ? py::none() : py::object(py::int_(k));
      },
      py::arg("f"), "Largest k with f pi/k-periodic; None for constants.");
  m.def(
      "john_bounds",
      [](int k) {
        const JohnBounds b = john_bounds(k);
        return py::make_tuple(b.s_lower, b.s_upper, b.c_k);
      },
      py::arg("k"));
  m.def(
      "ellipse", [](double a, double b, int n) { return to_array(ellipse(a, b, n).values()); }, py::arg("a"),
      py::arg("b"), py::arg("n") = 256);

  // affine
  m.def(
      "affine_data",
      [](const py::array_t<double>& s, double p, std::optional<py::array_t<double>> psi) {
        const Field w = psi ? to_field(*psi) : Field{};
        const AffineData a = affine_data(SupportField::from_samples(to_field(s)), p, w);
        py::dict d;
        d["sigma"] = to_array(a.sigma);
        d["g_density"] = to_array(a.g_density);
        d["mu"] = to_array(a.mu);
        d["omega_p"] = a.omega_p;
        d["omega_p_weighted"] = a.omega_p_weighted ? py::object(py::float_(*a.omega_p_weighted)) : py::none();
        return d;
      },
      py::arg("s"), py::arg("p") = 1.5, py::arg("psi") = py::none());
  m.def(
      "lambda_curve",
      [](const py::array_t<double>& s) {
        const LambdaCurve lc = lambda_curve(SupportField::from_samples(to_field(s)));
        py::array_t<double> pts({static_cast<py::ssize_t>(lc.points.size()), py::ssize_t{2}});
        auto w = pts.mutable_unchecked<2>();
        for (std::size_t i = 0; i < lc.points.size(); ++i) {
          w(static_cast<py::ssize_t>(i), 0) = lc.points[i][0];
          w(static_cast<py::ssize_t>(i), 1) = lc.points[i][1];
        }
        py::dict d;
        d["points"] = pts;
        d["euclid_curvature"] = to_array(lc.euclid_curvature);
        d["affine_curvature"] = to_array(lc.affine_curvature);
        d["closure_defect"] = lc.closure_defect;
        return d;
      },
      py::arg("s"));
  m.def(
      "count_critical_points", [](const py::array_t<double>& f) { return critical_dict(count_critical_points(to_field(f))); },
      py::arg("f"));

  // flow
  m.def(
      "evolve",
      [](const py::array_t<double>& s, const py::kwargs& kwargs) {
        FlowConfig cfg = config_from(kwargs, FlowConfig{});
        const Field s0 = to_field(s);
        if (!kwargs.contains("n_samples")) cfg.n_samples = static_cast<int>(s0.size());
        const FlowTrace trace = [&] {
          py::gil_scoped_release release;
          return run(cfg, SupportField::from_samples(s0));
        }();
        return trace_dict(trace);
      },
      py::arg("s"),
      "Runs the flow from s. Keyword arguments are the flow config keys (p, psi, normalize, max_steps, ...).");
  m.def(
      "extinction_bound",
      [](const py::array_t<double>& s, const py::kwargs& kwargs) {
        FlowConfig cfg = config_from(kwargs, FlowConfig{});
        const Field s0 = to_field(s);
        cfg.n_samples = static_cast<int>(s0.size());
        return extinction_bound(SupportField::from_samples(s0), cfg);
      },
      py::arg("s"));

  // solver
  m.def(
      "forward", [](const py::array_t<double>& s) { return to_array(forward(SupportField::from_samples(to_field(s)))); },
      py::arg("s"), "Phi = s (s'' + s)^{1/3}.");
  m.def(
      "solve",
      [](const py::array_t<double>& phi, double p, const py::kwargs& kwargs) {
        const TargetData target = make_target(to_field(phi), p);
        const FlowConfig cfg = config_from(kwargs, default_solve_config());
        const SolveReport r = [&] {
          py::gil_scoped_release release;
          return solve(target, cfg);
        }();
        py::dict d = from_json(to_json(r, {}));
        d["best_s"] = to_array(r.best_s.values());
        py::list snaps;
        for (const Snapshot& s : r.snapshots) snaps.append(to_array(s.s.values()));
        d["snapshot_curves"] = snaps;
        return d;
      },
      py::arg("phi"), py::arg("p") = 1.5,
      "Solves s (s'' + s)^{1/3} = Phi by the normalized flow; keyword arguments override the flow config.");

  // obstruction
  m.def(
      "diagnose",
      [](const py::array_t<double>& phi, std::optional<py::array_t<double>> u) {
        std::optional<SupportField> us;
        if (u) us = SupportField::from_samples(to_field(*u));
        const ObstructionReport r = diagnose(to_field(phi), us ? &*us : nullptr);
        py::dict d = from_json(to_json(r));
        d["b_values"] = to_array(r.b_values);
        return d;
      },
      py::arg("phi"), py::arg("u") = py::none());
  m.def(
      "b_functional",
      [](const py::array_t<double>& f, double x, int quadrature) { return b_functional(to_field(f), x, quadrature); },
      py::arg("f"), py::arg("x"), py::arg("quadrature") = kDefaultBQuadrature);
  m.def(
      "winding_number", [](const py::array_t<double>& f) { return winding_number(to_field(f)); }, py::arg("f"));

  m.def(
      "selftest",
      [](std::vector<int> criteria, std::uint64_t seed) {
        std::vector<acceptance::Result> results;
        {
          py::gil_scoped_release release;
          std::ostringstream log;
          results = acceptance::run_all(log, criteria, seed);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["criterion"] = r.id;
          d["name"] = r.name;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("criteria") = std::vector<int>{}, py::arg("seed") = acceptance::kDefaultSeed);
}
