#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "maxslope/analysis.hpp"
#include "maxslope/errors.hpp"
#include "maxslope/experiment.hpp"
#include "maxslope/flow.hpp"
#include "maxslope/io.hpp"
#include "maxslope/transform.hpp"

namespace py = pybind11;
namespace ms = maxslope;

namespace {

// Dicts cross the boundary as JSON text; the payloads are small.
ms::Json to_json(const py::handle& obj) {
  auto dumps = py::module_::import("json").attr("dumps");
  return ms::Json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const ms::Json& j) {
  auto loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

py::object point_to_py(const ms::Point& p) {
  if (const auto* t = std::get_if<ms::TripodPoint>(&p)) return py::make_tuple(t->branch, t->radius);
  return py::cast(std::get<ms::EuclideanPoint>(p).coords);
}

// Euclidean points are sequences of floats (a bare float in one dimension),
// tripod points are (branch, radius) pairs.
ms::Point point_from_py(const ms::MetricSpace& space, const py::handle& h) {
  ms::Point p;
  if (std::holds_alternative<ms::Tripod>(space)) {
    const auto pair = h.cast<std::pair<int, double>>();
    p = ms::tripod_point(pair.first, pair.second);
  } else if (py::isinstance<py::float_>(h) || py::isinstance<py::int_>(h)) {
    p = ms::euclidean_point({h.cast<double>()});
  } else {
    p = ms::euclidean_point(h.cast<std::vector<double>>());
  }
  ms::require_valid(space, p);
  return p;
}

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::object optional_array(const std::optional<std::vector<double>>& v) {
  return v ? py::object(as_array(*v)) : py::object(py::none());
}

ms::ExperimentStage stage_from(const std::string& s) {
  if (s == "solve") return ms::ExperimentStage::kSolve;
  if (s == "transform") return ms::ExperimentStage::kTransform;
  if (s == "verify") return ms::ExperimentStage::kVerify;
  throw ms::Error("stage must be 'solve', 'transform' or 'verify', got '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-curves of maximal slope on Euclidean spaces and the tripod, and their exponent transforms";

  auto base = py::register_exception<ms::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ms::SpaceMismatch>(m, "SpaceMismatch", base.ptr());
  py::register_exception<ms::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ms::HypothesisError>(m, "HypothesisError", base.ptr());
  py::register_exception<ms::SolverError>(m, "SolverError", base.ptr());

  py::class_<ms::Functional>(m, "Functional")
      .def_static("quadratic", &ms::Functional::quadratic, py::arg("scale") = 1.0,
                  py::arg("center") = std::vector<double>{0.0})
      .def_static("negative_quadratic", &ms::Functional::negative_quadratic, py::arg("dimension") = 1)
      .def_static("norm_like", &ms::Functional::norm_like)
      .def_static(
          "distance_to_point",
          [](int branch, double radius) { return ms::Functional::distance_to_point(ms::TripodPoint{branch, radius}); },
          py::arg("branch"), py::arg("radius"))
      .def_static(
          "from_dict", [](const py::dict& d) { return ms::functional_from_json(to_json(d)); }, py::arg("spec"))
      .def("to_dict", [](const ms::Functional& f) { return from_json(ms::functional_to_json(f)); })
      .def_property_readonly("tag", &ms::Functional::tag)
      .def_property_readonly("space", [](const ms::Functional& f) { return ms::space_name(f.space()); })
      .def_property_readonly("profile",
                             [](const ms::Functional& f) { return from_json(ms::profile_to_json(f.profile())); })
      .def(
          "__call__", [](const ms::Functional& f, const py::object& v) { return ms::evaluate(f, point_from_py(f.space(), v)); },
          py::arg("point"))
      .def(
          "slope",
          [](const ms::Functional& f, const py::object& v) { return ms::slope_analytic(f, point_from_py(f.space(), v)); },
          py::arg("point"), "Local slope |d^- f| at a point")
      .def(
          "distance",
          [](const ms::Functional& f, const py::object& a, const py::object& b) {
            return ms::distance(f.space(), point_from_py(f.space(), a), point_from_py(f.space(), b));
          },
          py::arg("a"), py::arg("b"), "Distance in the functional's space")
      .def(
          "prox",
          [](const ms::Functional& f, double p, double tau, const py::object& v) {
            return point_to_py(ms::proximal(f, p, tau, point_from_py(f.space(), v)));
          },
          py::arg("p"), py::arg("tau"), py::arg("point"), "Minimizer of f(w) + d^p(w, v) / (p tau^(p-1))")
      .def(
          "moreau_envelope",
          [](const ms::Functional& f, double p, double t, const py::object& v) {
            return ms::moreau_envelope(f, p, t, point_from_py(f.space(), v));
          },
          py::arg("p"), py::arg("t"), py::arg("point"))
      .def("__repr__", [](const ms::Functional& f) { return "<Functional " + ms::functional_to_json(f).dump() + ">"; });

  py::class_<ms::SampledCurve>(m, "Curve")
      .def_static(
          "from_dict", [](const py::dict& d) { return ms::curve_from_json(to_json(d)); }, py::arg("data"))
      .def("to_dict", [](const ms::SampledCurve& c) { return from_json(ms::curve_to_json(c)); })
      .def_readonly("p", &ms::SampledCurve::p)
      .def_property_readonly("times", [](const ms::SampledCurve& c) { return as_array(c.times); })
      .def_property_readonly("points",
                             [](const ms::SampledCurve& c) {
                               py::list out;
                               for (const auto& p : c.points) out.append(point_to_py(p));
                               return out;
                             })
      .def_property_readonly("f_values", [](const ms::SampledCurve& c) { return optional_array(c.f_values); })
      .def_property_readonly("slopes", [](const ms::SampledCurve& c) { return optional_array(c.slopes); })
      .def_property_readonly("source", [](const ms::SampledCurve& c) { return c.meta.source; })
      .def_property_readonly("blow_up", [](const ms::SampledCurve& c) { return c.meta.blow_up; })
      .def(
          "at", [](const ms::SampledCurve& c, double t) { return point_to_py(c.at(t)); }, py::arg("t"))
      .def(
          "write",
          [](const ms::SampledCurve& c, const ms::Functional& f, const std::string& path) {
            const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
            ms::export_curve(c, f, json ? ms::CurveFormat::kJson : ms::CurveFormat::kCsv, path);
          },
          py::arg("functional"), py::arg("path"), "Write as CSV, or as JSON when the path ends in .json")
      .def("__len__", &ms::SampledCurve::size)
      .def("__repr__", [](const ms::SampledCurve& c) {
        return "<Curve p=" + std::to_string(c.p) + " nodes=" + std::to_string(c.size()) + " source=" + c.meta.source +
               ">";
      });

  py::class_<ms::TransformResult>(m, "TransformResult")
      .def_readonly("transformed", &ms::TransformResult::transformed)
      .def_readonly("p", &ms::TransformResult::p)
      .def_readonly("p_prime", &ms::TransformResult::p_prime)
      .def_property_readonly("case", [](const ms::TransformResult& r) { return ms::to_string(r.extension_case); })
      .def_property_readonly("condition", [](const ms::TransformResult& r) { return ms::to_string(r.condition); })
      .def_property_readonly("blocked", &ms::TransformResult::blocked)
      .def_property_readonly("alpha", [](const ms::TransformResult& r) { return r.time_map.alpha; })
      .def_property_readonly("S_star",
                             [](const ms::TransformResult& r) {
                               return r.time_map.total_S.infinite ? py::float_(INFINITY)
                                                                  : py::float_(r.time_map.total_S.value);
                             })
      .def_property_readonly("t_star",
                             [](const ms::TransformResult& r) {
                               return r.horizon.infinite() ? py::float_(INFINITY) : py::float_(*r.horizon.t_star);
                             })
      .def_property_readonly("limit",
                             [](const ms::TransformResult& r) {
                               return r.limit ? point_to_py(*r.limit) : py::object(py::none());
                             })
      .def_property_readonly("time_map",
                             [](const ms::TransformResult& r) {
                               return py::make_tuple(as_array(r.time_map.knots_t), as_array(r.time_map.knots_s));
                             })
      .def("to_dict", [](const ms::TransformResult& r) { return from_json(ms::transform_to_json(r)); });

  m.def(
      "solve",
      [](const ms::Functional& f, double p, const py::object& u0, double tau, double horizon, bool stop_on_critical,
         double blow_up_radius) {
        ms::SolverConfig cfg{.tau = tau, .horizon = horizon, .stop_on_critical = stop_on_critical,
                             .blow_up_radius = blow_up_radius};
        const auto start = point_from_py(f.space(), u0);
        py::gil_scoped_release release;
        return ms::solve_minimizing_movements(f, p, start, cfg);
      },
      py::arg("functional"), py::arg("p"), py::arg("u0"), py::arg("tau") = 1e-3, py::arg("horizon") = 1.0,
      py::arg("stop_on_critical") = false, py::arg("blow_up_radius") = 1e6,
      "Minimizing movements v_{k+1} = prox_tau(v_k) on t_k = k tau");

  m.def(
      "oracle",
      [](const ms::Functional& f, double p, const py::object& u0, const std::vector<double>& grid, double theta) {
        return ms::oracle_flow(f, p, point_from_py(f.space(), u0), grid, {.theta = theta});
      },
      py::arg("functional"), py::arg("p"), py::arg("u0"), py::arg("grid"), py::arg("theta") = 0.0,
      "Closed-form flow sampled on a grid starting at 0");

  m.def(
      "linspace", [](double end, std::size_t count) { return as_array(ms::linspace(end, count)); }, py::arg("end"),
      py::arg("count"));

  m.def("alpha", &ms::alpha, py::arg("p"), py::arg("p_prime"), "Exponent 1 - (p - 1)/(p' - 1) of the time change");

  m.def(
      "transform",
      [](const ms::SampledCurve& curve, const ms::Functional& f, double p, double p_prime, std::size_t samples) {
        ms::TransformOptions opts;
        opts.samples = samples;
        py::gil_scoped_release release;
        return ms::transform_curve(curve, f, p, p_prime, f.profile(), opts);
      },
      py::arg("curve"), py::arg("functional"), py::arg("p"), py::arg("p_prime"), py::arg("samples") = 0,
      "Reparametrize a p-curve of maximal slope into a p'-curve");

  m.def(
      "verify_duality",
      [](const ms::SampledCurve& original, const ms::TransformResult& r, const ms::Functional& f, double tolerance) {
        return from_json(ms::report_to_json(ms::verify_duality(original, r, f, f.profile(), tolerance)));
      },
      py::arg("original"), py::arg("result"), py::arg("functional"), py::arg("tolerance") = 1e-3);

  m.def(
      "metric_derivative", [](const ms::SampledCurve& c) { return as_array(ms::metric_derivative(c)); },
      py::arg("curve"));

  m.def(
      "positivity_horizon",
      [](const ms::SampledCurve& c, const ms::Functional& f, double eps) {
        const auto h = ms::detect_positivity_horizon(c, f, eps);
        py::dict d;
        d["t_star"] = h.infinite() ? INFINITY : *h.t_star;
        d["stationary_tail"] = h.stationary_tail;
        d["stopped"] = h.stopped();
        return d;
      },
      py::arg("curve"), py::arg("functional"), py::arg("eps") = ms::kCriticalSlope);

  m.def(
      "arc_length",
      [](const ms::SampledCurve& c, const ms::Functional& f, std::size_t samples) {
        return ms::arc_length_reparametrize(c, f, samples).curve;
      },
      py::arg("curve"), py::arg("functional"), py::arg("samples") = 0,
      "Unit-speed reparametrization on [0, t*]");

  m.def(
      "check_energy_identity",
      [](const ms::SampledCurve& c, const ms::Functional& f, double p, double tolerance) {
        return from_json(ms::report_to_json(ms::check_energy_identity(c, f, p, tolerance)));
      },
      py::arg("curve"), py::arg("functional"), py::arg("p"), py::arg("tolerance") = 1e-2);

  m.def(
      "run_experiment",
      [](const py::dict& config, const std::string& stage) {
        const auto cfg = ms::parse_experiment(to_json(config));
        const auto st = stage_from(stage);
        ms::ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = ms::run_experiment(cfg, st);
        }
        py::dict out = from_json(r.report);
        out["exit_code"] = r.exit_code;
        return out;
      },
      py::arg("config"), py::arg("stage") = "verify",
      "Run an experiment config (same schema as the CLI) and return its report");

  m.def("example_names", &ms::example_names);
  m.def(
      "reproduce",
      [](const std::string& name, const std::string& out, double tol_scale) {
        py::gil_scoped_release release;
        return ms::reproduce_example(name, out, tol_scale);
      },
      py::arg("name"), py::arg("out"), py::arg("tol_scale") = 1.0, "Run a curated example; returns its exit code");
}
