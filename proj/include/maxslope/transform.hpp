#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maxslope/analysis.hpp"
#include "maxslope/curve.hpp"
#include "maxslope/functional.hpp"
#include "maxslope/time_map.hpp"

namespace maxslope {

/// Finiteness of (S*, t*):
///   A: S* = inf, t* = inf    B: S* = inf, t* < inf
///   C: S* < inf, t* < inf    D: S* < inf, t* = inf
enum class ExtensionCase { kA, kB, kC, kD };

/// Which hypothesis of the lambda < 0 construction holds. kNotRequired is
/// used for lambda >= 0, where no extra hypothesis is needed.
enum class TransformCondition { kA, kB, kC, kBlocked, kNotRequired };

std::string to_string(ExtensionCase c);
std::string to_string(TransformCondition c);

struct TransformOptions {
  /// 0 places node i at s(t_i) and carries the i-th input sample over
  /// unchanged; n > 0 resamples on n equally spaced s in the resolved part of
  /// [0, S*) by interpolating the input.
  std::size_t samples = 0;
  /// Constant nodes appended after S* in cases C and D; 0 picks a tenth of the
  /// transformed node count.
  std::size_t extension_nodes = 0;
  /// Cauchy tolerance over the last tenth of the grid for the limit in case D.
  double limit_tolerance = 1e-6;
  double energy_tolerance = 1e-2;
  double eps = kCriticalSlope;
  TailOptions tail;
};

struct TransformResult {
  SampledCurve transformed;  ///< u_{p'} = u o t(s), exponent p'
  TimeMap time_map;          ///< s(t) = int_0^t |u'|^alpha
  ExtensionCase extension_case = ExtensionCase::kA;
  TransformCondition condition = TransformCondition::kNotRequired;
  PositivityHorizon horizon;   ///< t* of the input curve
  std::optional<Point> limit;  ///< u(t*) or lim u(t) used for the constant extension
  std::vector<DiagnosticsReport> diagnostics;
  double p = 2.0;
  double p_prime = 2.0;

  bool blocked() const { return condition == TransformCondition::kBlocked; }
};

/// alpha = 1 - (p/q)(q'/p') = 1 - (p - 1)/(p' - 1). Always < 1.
double alpha(double p, double p_prime);

/// Throws HypothesisError unless (lambda >= 0, any p, p' > 1) or
/// (lambda < 0, p0 >= 2, p and p' in (1, p0]).
void check_transform_hypotheses(const ConvexityProfile& profile, double p, double p_prime);

/// s(t) = int_0^t |u'|^alpha on [0, t*), with S* finiteness decided by tail fits.
TimeMap forward_time_map(const SampledCurve& curve, const Functional& f, double p, double p_prime,
                         const TransformOptions& opts = {});

/// u_{p'} = u o t_{p -> p'} with case classification and constant extension.
TransformResult transform_curve(const SampledCurve& curve, const Functional& f, double p, double p_prime,
                                const ConvexityProfile& profile, const TransformOptions& opts = {});

struct DualityMeasures {
  double roundtrip_sup = 0.0;   ///< sup_t d(u(t), (u_{p'})_{p}(t)) over the common domain
  double dual_time_gap = 0.0;   ///< |t*_{u_{p'}} - S*_{p -> p'}|
  double dual_total_gap = 0.0;  ///< |S*_{p' -> p} - t*_u|
  std::size_t compared_nodes = 0;
  TransformResult reverse;
};

/// Transforms the result back to exponent p and measures the dual and
/// inverse relations.
DualityMeasures measure_duality(const SampledCurve& original, const TransformResult& result, const Functional& f,
                                const ConvexityProfile& profile, const TransformOptions& opts = {});

DiagnosticsReport verify_duality(const SampledCurve& original, const TransformResult& result, const Functional& f,
                                 const ConvexityProfile& profile, double tolerance = 1e-3,
                                 const TransformOptions& opts = {});

}  // namespace maxslope
