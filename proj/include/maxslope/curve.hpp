#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "maxslope/metric.hpp"

namespace maxslope {

class Functional;

struct CurveMetadata {
  std::string functional_tag;
  std::string source;  ///< "solver", "oracle", "transform", "arc_length" or "import"
  std::optional<double> tau;
  bool blow_up = false;
  bool critical_stop = false;
};

/// A curve sampled on a strictly increasing time grid starting at 0, with
/// optional per-node caches of f, the local slope and the metric derivative.
struct SampledCurve {
  MetricSpace space = Euclidean{1};
  std::vector<double> times;
  std::vector<Point> points;
  double p = 2.0;
  std::optional<std::vector<double>> f_values;
  std::optional<std::vector<double>> slopes;
  std::optional<std::vector<double>> metric_derivatives;
  CurveMetadata meta;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double end_time() const { return times.back(); }

  /// Throws DomainError when a structural invariant is broken.
  void validate() const;

  /// Point at time t by geodesic interpolation between neighbouring nodes;
  /// t is clamped to [0, end_time()].
  Point at(double t) const;

  /// Prefix of the curve holding nodes [0, count).
  SampledCurve prefix(std::size_t count) const;
};

/// Fills f_values and slopes (analytic) for every node.
void attach_values(SampledCurve& curve, const Functional& f);

/// `count` equally spaced times from 0 to `end` inclusive.
std::vector<double> linspace(double end, std::size_t count);

/// Index of the segment [t_i, t_{i+1}] containing t (clamped).
std::size_t locate(const std::vector<double>& knots, double t);

}  // namespace maxslope
