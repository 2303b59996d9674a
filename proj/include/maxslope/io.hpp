#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "maxslope/analysis.hpp"
#include "maxslope/curve.hpp"
#include "maxslope/functional.hpp"
#include "maxslope/metric.hpp"
#include "maxslope/transform.hpp"

namespace maxslope {

using Json = nlohmann::json;

// Points: {"space":"euclidean","coords":[...]} or {"space":"tripod","branch":0,"radius":2.0}.
Json point_to_json(const Point& p);
Point point_from_json(const Json& j);

// Functionals: {"functional":"negative_quadratic","space":"euclidean","dim":1}, with optional
// "scale"/"center" (quadratic), "anchor" (distance_to_point) and "profile" override.
Json functional_to_json(const Functional& f);
Functional functional_from_json(const Json& j);

Json profile_to_json(const ConvexityProfile& profile);
ConvexityProfile profile_from_json(const Json& j);

Json report_to_json(const DiagnosticsReport& r);
Json time_map_summary(const TimeMap& map);
Json transform_to_json(const TransformResult& r);

/// Full curve with metadata and caches; `curve_from_json` inverts it exactly.
Json curve_to_json(const SampledCurve& curve);
SampledCurve curve_from_json(const Json& j);

/// Header `t,<point fields>,f,slope,metric_derivative`; reals printed with
/// 17 significant digits. Missing caches are computed from `f` (metric
/// derivative from the samples).
void write_curve_csv(std::ostream& out, const SampledCurve& curve, const Functional& f);

enum class CurveFormat { kCsv, kJson };

/// Writes the curve to `path`, creating missing parent directories; throws
/// Error on IO failure.
void export_curve(const SampledCurve& curve, const Functional& f, CurveFormat format,
                  const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

}  // namespace maxslope
