#include "maxslope/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

Json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double real_from(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

Json extent(const Extent& e) { return Json{{"value", real(e.value)}, {"infinite", e.infinite}}; }

Json optional_series(const std::optional<std::vector<double>>& v) {
  if (!v) return nullptr;
  Json arr = Json::array();
  for (double x : *v) arr.push_back(real(x));
  return arr;
}

std::optional<std::vector<double>> series_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  std::vector<double> out;
  for (const auto& x : j.at(key)) out.push_back(real_from(x));
  return out;
}

MetricSpace space_from_json(const Json& j) {
  const auto name = j.value("space", std::string("euclidean"));
  if (name == "tripod") return Tripod{};
  if (name == "euclidean") return Euclidean{j.value("dim", std::size_t{1})};
  throw Error("unknown space '" + name + "'");
}

Json space_to_json(const MetricSpace& space) {
  if (const auto* e = std::get_if<Euclidean>(&space)) return Json{{"space", "euclidean"}, {"dim", e->dimension}};
  return Json{{"space", "tripod"}};
}

std::string psi_name(PsiFamily f) { return f == PsiFamily::kLinear ? "linear" : "power"; }

}  // namespace

Json point_to_json(const Point& p) {
  if (const auto* e = std::get_if<EuclideanPoint>(&p)) return Json{{"space", "euclidean"}, {"coords", e->coords}};
  const auto& t = std::get<TripodPoint>(p);
  return Json{{"space", "tripod"}, {"branch", t.branch}, {"radius", t.radius}};
}

Point point_from_json(const Json& j) {
  const auto space = j.value("space", std::string("euclidean"));
  if (space == "euclidean") return EuclideanPoint{j.at("coords").get<std::vector<double>>()};
  if (space == "tripod") return tripod_point(j.at("branch").get<int>(), j.at("radius").get<double>());
  throw Error("unknown point space '" + space + "'");
}

Json profile_to_json(const ConvexityProfile& profile) {
  return Json{{"p0", profile.p0}, {"lambda", profile.lambda}, {"psi", psi_name(profile.psi_family)}};
}

ConvexityProfile profile_from_json(const Json& j) {
  ConvexityProfile profile;
  profile.p0 = j.value("p0", 2.0);
  profile.lambda = j.value("lambda", 0.0);
  const auto psi = j.value("psi", std::string("linear"));
  if (psi == "linear") {
    profile.psi_family = PsiFamily::kLinear;
  } else if (psi == "power") {
    profile.psi_family = PsiFamily::kPower;
  } else {
    throw Error("unknown psi family '" + psi + "'");
  }
  return profile;
}

Json functional_to_json(const Functional& f) {
  Json j = space_to_json(f.space());
  j["functional"] = f.tag();
  if (const auto* q = std::get_if<Quadratic>(&f.kind())) {
    j["scale"] = q->scale;
    j["center"] = q->center;
  } else if (const auto* d = std::get_if<DistanceToPoint>(&f.kind())) {
    j["anchor"] = Json{{"branch", d->anchor.branch}, {"radius", d->anchor.radius}};
  }
  j["profile"] = profile_to_json(f.profile());
  return j;
}

Functional functional_from_json(const Json& j) {
  const auto tag = j.at("functional").get<std::string>();
  const std::size_t dim = j.value("dim", std::size_t{1});
  auto base = [&]() -> Functional {
    if (tag == "quadratic") {
      auto center = j.contains("center") ? j.at("center").get<std::vector<double>>() : std::vector<double>(dim, 0.0);
      if (center.size() != dim && j.contains("dim")) throw SpaceMismatch("quadratic center does not match dim");
      return Functional::quadratic(j.value("scale", 1.0), std::move(center));
    }
    if (tag == "negative_quadratic") return Functional::negative_quadratic(dim);
    if (tag == "norm_like") {
      if (dim != 1) throw SpaceMismatch("norm_like is defined on euclidean dimension 1");
      return Functional::norm_like();
    }
    if (tag == "distance_to_point") {
      const auto& a = j.at("anchor");
      return Functional::distance_to_point(TripodPoint{a.value("branch", 0), a.value("radius", 0.0)});
    }
    throw Error("unknown functional '" + tag + "'");
  }();
  if (j.contains("space") && space_name(base.space()) != j.at("space").get<std::string>()) {
    throw SpaceMismatch("functional '" + tag + "' does not live on space '" + j.at("space").get<std::string>() + "'");
  }
  if (j.contains("profile")) return base.with_profile(profile_from_json(j.at("profile")));
  return base;
}

Json report_to_json(const DiagnosticsReport& r) {
  Json j{{"name", r.name},
         {"tolerance", real(r.tolerance)},
         {"max_residual", real(r.max_residual)},
         {"mean_residual", real(r.mean_residual)},
         {"passed", r.passed},
         {"violated_indices", r.violated_indices}};
  if (r.skipped) j["skipped"] = true;
  if (r.margin) j["margin"] = real(*r.margin);
  return j;
}

Json time_map_summary(const TimeMap& map) {
  return Json{{"alpha", real(map.alpha)},
              {"S_star", extent(map.total_S)},
              {"t_star", extent(map.domain_end)},
              {"knots", map.size()}};
}

Json transform_to_json(const TransformResult& r) {
  Json diagnostics = Json::array();
  for (const auto& d : r.diagnostics) diagnostics.push_back(report_to_json(d));
  Json j{{"p", r.p},
         {"p_prime", r.p_prime},
         {"alpha", real(r.time_map.alpha)},
         {"case", to_string(r.extension_case)},
         {"condition", to_string(r.condition)},
         {"status", r.blocked() ? "blocked" : "ok"},
         {"S_star", extent(r.time_map.total_S)},
         {"t_star", r.horizon.stopped() ? extent(Extent{*r.horizon.t_star, false}) : extent(Extent{0.0, true})},
         {"diagnostics", diagnostics}};
  j["limit"] = r.limit ? point_to_json(*r.limit) : Json(nullptr);
  return j;
}

Json curve_to_json(const SampledCurve& curve) {
  Json points = Json::array();
  for (const auto& p : curve.points) points.push_back(point_to_json(p));
  Json meta{{"functional", curve.meta.functional_tag},
            {"source", curve.meta.source},
            {"blow_up", curve.meta.blow_up},
            {"critical_stop", curve.meta.critical_stop}};
  meta["tau"] = curve.meta.tau ? Json(*curve.meta.tau) : Json(nullptr);
  return Json{{"p", curve.p},
              {"space", space_to_json(curve.space)},
              {"metadata", meta},
              {"times", curve.times},
              {"points", points},
              {"f_values", optional_series(curve.f_values)},
              {"slopes", optional_series(curve.slopes)},
              {"metric_derivatives", optional_series(curve.metric_derivatives)}};
}

SampledCurve curve_from_json(const Json& j) {
  SampledCurve c;
  c.p = j.at("p").get<double>();
  c.space = space_from_json(j.at("space"));
  c.times = j.at("times").get<std::vector<double>>();
  for (const auto& p : j.at("points")) c.points.push_back(point_from_json(p));
  c.f_values = series_from(j, "f_values");
  c.slopes = series_from(j, "slopes");
  c.metric_derivatives = series_from(j, "metric_derivatives");
  if (j.contains("metadata")) {
    const auto& m = j.at("metadata");
    c.meta.functional_tag = m.value("functional", std::string());
    c.meta.source = m.value("source", std::string("import"));
    c.meta.blow_up = m.value("blow_up", false);
    c.meta.critical_stop = m.value("critical_stop", false);
    if (m.contains("tau") && !m.at("tau").is_null()) c.meta.tau = m.at("tau").get<double>();
  }
  c.validate();
  return c;
}

void write_curve_csv(std::ostream& out, const SampledCurve& curve, const Functional& f) {
  const auto values = curve_values(curve, f);
  const auto slopes = curve_slopes(curve, f);
  std::vector<double> speeds;
  if (curve.metric_derivatives) {
    speeds = *curve.metric_derivatives;
  } else if (curve.size() >= 2) {
    speeds = metric_derivative(curve);
  } else {
    speeds.assign(curve.size(), 0.0);
  }

  out << "t";
  for (const auto& name : point_field_names(curve.space)) out << ',' << name;
  out << ",f,slope,metric_derivative\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << curve.times[i];
    for (double x : point_fields(curve.points[i])) out << ',' << x;
    out << ',' << values[i] << ',' << slopes[i] << ',' << speeds[i] << '\n';
  }
}

namespace {

void ensure_parent(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
}

}  // namespace

void export_curve(const SampledCurve& curve, const Functional& f, CurveFormat format,
                  const std::filesystem::path& path) {
  if (format == CurveFormat::kJson) {
    SampledCurve copy = curve;
    if (!copy.f_values || !copy.slopes) attach_values(copy, f);
    write_json_file(path, curve_to_json(copy));
    return;
  }
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_curve_csv(out, curve, f);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

}  // namespace maxslope
