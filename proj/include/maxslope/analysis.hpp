#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxslope/curve.hpp"
#include "maxslope/functional.hpp"
#include "maxslope/time_map.hpp"

namespace maxslope {

/// Slope threshold below which a point is treated as critical.
inline constexpr double kCriticalSlope = 1e-8;
/// Distance below which two curve points are treated as coincident.
inline constexpr double kStationaryTolerance = 1e-10;

struct DiagnosticsReport {
  std::string name;
  double tolerance = 0.0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<std::size_t> violated_indices;
  bool passed = true;
  /// Set when the check does not apply (missing infimum, empty curve, ...).
  bool skipped = false;
  /// Smallest slack rhs - lhs over all evaluated inequalities, when reported.
  std::optional<double> margin;

  /// passed <=> max residual <= tolerance; indices are those with residual > tolerance.
  static DiagnosticsReport from_residuals(std::string name, std::span<const double> residuals, double tolerance);
  static DiagnosticsReport skipped_check(std::string name, double tolerance);
};

/// Merges several reports into one named report (max of maxima, mean of means).
DiagnosticsReport combine(std::string name, std::span<const DiagnosticsReport> parts);

/// A time t* after which the slope along the curve stays at or below eps.
struct PositivityHorizon {
  std::optional<double> t_star;  ///< nullopt encodes +inf
  std::size_t index = 0;         ///< grid index of t_star (size() when infinite)
  bool stationary_tail = false;

  bool infinite() const { return !t_star.has_value(); }
  /// t* is finite and the curve is constant afterwards: the flow has stopped.
  bool stopped() const { return t_star.has_value() && stationary_tail; }
};

/// Central differences d(u_{i+1}, u_{i-1}) / (t_{i+1} - t_{i-1}) inside,
/// second-order one-sided estimates at the ends.
std::vector<double> metric_derivative(const SampledCurve& curve);

/// Metric derivative computed separately on [0, t_k] and [t_k, T] so that
/// no stencil straddles node k. Node k gets its left one-sided value.
std::vector<double> metric_derivative_split(const SampledCurve& curve, std::size_t k);

/// Cached slopes when present, analytic slopes otherwise.
std::vector<double> curve_slopes(const SampledCurve& curve, const Functional& f);
std::vector<double> curve_values(const SampledCurve& curve, const Functional& f);

/// When the curve ends in a run of identical nodes whose first node has
/// slope <= eps, t* is the start of that run. Otherwise t* is the first node
/// after the last node whose slope exceeds eps, reported as +inf when the
/// slope is above eps at the final node.
PositivityHorizon detect_positivity_horizon(const SampledCurve& curve, const Functional& f,
                                            double eps = kCriticalSlope);

struct ArcLengthResult {
  TimeMap map;          ///< s(t) = int_0^t |u'|
  SampledCurve curve;   ///< u~ on a uniform s-grid; empty for a degenerate curve
};

/// Arc-length reparametrization on [0, t*]. `samples` = 0 keeps the node count.
ArcLengthResult arc_length_reparametrize(const SampledCurve& curve, const Functional& f, std::size_t samples = 0,
                                         double eps = kCriticalSlope);

/// d(u(s_i), u(s_j)) <= |s_i - s_j| + tolerance over dyadic strides.
DiagnosticsReport check_lipschitz(const SampledCurve& curve, double tolerance = 1e-8);

/// Discrete energy identity: residuals of (f o u)' + |u'|^p / p + |d^- f|^q / q
/// and of |u'|^p - |d^- f|^q at every node away from t*.
DiagnosticsReport check_energy_identity(const SampledCurve& curve, const Functional& f, double p,
                                        double tolerance = 1e-2);

/// (f o u~)'(s) = -|d^- f|(u~(s)) on an arc-length parametrized curve.
DiagnosticsReport check_reparametrized_identity(const SampledCurve& reparam, const Functional& f,
                                                double tolerance = 1e-2);

/// (2, -lambda^-)-convexity of s -> f(u~(s)) on windows of width <= 1.
DiagnosticsReport check_convexity_along_curve(const SampledCurve& reparam, const Functional& f,
                                              const ConvexityProfile& profile, double tolerance = 1e-6);

/// Individual regularizing-effect inequalities; an item that does not
/// apply is returned with `skipped` set.
std::vector<DiagnosticsReport> regularizing_bound_items(const SampledCurve& curve, const Functional& f, double p,
                                                        const ConvexityProfile& profile, double tolerance = 1e-6);

/// All regularizing-effect inequalities merged into one report.
DiagnosticsReport check_regularizing_bounds(const SampledCurve& curve, const Functional& f, double p,
                                            const ConvexityProfile& profile, double tolerance = 1e-6);

/// Largest upward jump of the slope along the curve. Requires lambda >= 0.
DiagnosticsReport check_slope_monotone(const SampledCurve& curve, const Functional& f,
                                       const ConvexityProfile& profile, double tolerance = 1e-8);

/// Sampled convexity defect of f along the geodesic from v0 to v1 at theta:
/// max(0, f(g) - (1-t) f(v0) - t f(v1) + lambda t (1 - psi(t)) d^p0).
double convexity_defect(const Functional& f, const ConvexityProfile& profile, const Point& v0, const Point& v1,
                        double theta);

}  // namespace maxslope
