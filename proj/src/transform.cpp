#include "maxslope/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

struct Restriction {
  PositivityHorizon horizon;
  SampledCurve working;  // the curve on [0, t*] (or the whole grid when t* = inf)
};

Restriction restrict_to_horizon(const SampledCurve& curve, const Functional& f, double eps) {
  Restriction r;
  r.horizon = detect_positivity_horizon(curve, f, eps);
  // A finite t* only counts when the curve really stops there; a slope that
  // merely drops below eps while the curve keeps moving is a decaying tail.
  r.working = r.horizon.stopped() ? curve.prefix(r.horizon.index + 1) : curve;
  return r;
}

TimeMap time_map_on(const Restriction& r, double a, const TailOptions& tail) {
  if (r.working.size() < 2) {
    TimeMap map;
    map.alpha = a;
    map.knots_t = {0.0};
    map.knots_s = {0.0};
    return map;
  }
  const auto speeds = metric_derivative(r.working);
  return integrate_speed_power(r.working.times, speeds, a, r.horizon.stopped(), tail);
}

Extent extent_of(const PositivityHorizon& h) {
  if (h.stopped()) return Extent{*h.t_star, false};
  return Extent{0.0, true};
}

double gap(const Extent& a, const Extent& b) {
  if (a.infinite && b.infinite) return 0.0;
  if (a.infinite != b.infinite) return std::numeric_limits<double>::infinity();
  return std::abs(a.value - b.value);
}

}  // namespace

std::string to_string(ExtensionCase c) {
  switch (c) {
    case ExtensionCase::kA: return "A";
    case ExtensionCase::kB: return "B";
    case ExtensionCase::kC: return "C";
    case ExtensionCase::kD: return "D";
  }
  return "?";
}

std::string to_string(TransformCondition c) {
  switch (c) {
    case TransformCondition::kA: return "a";
    case TransformCondition::kB: return "b";
    case TransformCondition::kC: return "c";
    case TransformCondition::kBlocked: return "blocked";
    case TransformCondition::kNotRequired: return "not_required";
  }
  return "?";
}

double alpha(double p, double p_prime) {
  const double q = conjugate(p);
  const double q_prime = conjugate(p_prime);
  return 1.0 - (p / q) * (q_prime / p_prime);
}

void check_transform_hypotheses(const ConvexityProfile& profile, double p, double p_prime) {
  conjugate(p);
  conjugate(p_prime);
  if (profile.lambda >= 0.0) return;
  std::ostringstream msg;
  if (profile.p0 < 2.0) {
    msg << "lambda < 0 requires p0 >= 2, got p0 = " << profile.p0;
    throw HypothesisError(msg.str());
  }
  if (p > profile.p0 || p_prime > profile.p0) {
    msg << "lambda < 0 requires p, p' in (1, p0 = " << profile.p0 << "], got p = " << p << ", p' = " << p_prime;
    throw HypothesisError(msg.str());
  }
}

TimeMap forward_time_map(const SampledCurve& curve, const Functional& f, double p, double p_prime,
                         const TransformOptions& opts) {
  const Restriction r = restrict_to_horizon(curve, f, opts.eps);
  return time_map_on(r, alpha(p, p_prime), opts.tail);
}

TransformResult transform_curve(const SampledCurve& curve, const Functional& f, double p, double p_prime,
                                const ConvexityProfile& profile, const TransformOptions& opts) {
  check_transform_hypotheses(profile, p, p_prime);
  if (curve.empty()) throw DomainError("cannot transform an empty curve");

  TransformResult result;
  result.p = p;
  result.p_prime = p_prime;
  const Restriction r = restrict_to_horizon(curve, f, opts.eps);
  result.horizon = r.horizon;
  result.time_map = time_map_on(r, alpha(p, p_prime), opts.tail);
  const TimeMap& map = result.time_map;

  const bool s_infinite = map.total_S.infinite;
  const bool t_infinite = !r.horizon.stopped();
  if (s_infinite) {
    result.extension_case = t_infinite ? ExtensionCase::kA : ExtensionCase::kB;
  } else {
    result.extension_case = t_infinite ? ExtensionCase::kD : ExtensionCase::kC;
  }

  SampledCurve& out = result.transformed;
  if (map.empty()) {
    out.space = curve.space;
    out.times = {0.0};
    out.points = {curve.points.front()};
  } else if (opts.samples == 0) {
    out = compose_on_knots(r.working, map);
  } else {
    out = resample_through(r.working, map, opts.samples);
  }
  out.p = p_prime;
  out.meta = curve.meta;
  out.meta.source = "transform";

  // Limit used for the constant extension after S*.
  bool extend = false;
  if (result.extension_case == ExtensionCase::kC) {
    result.limit = r.working.points.back();
    extend = true;
  } else if (result.extension_case == ExtensionCase::kD) {
    const double t_end = r.working.end_time();
    const Point& last = r.working.points.back();
    double spread = 0.0;
    for (std::size_t i = r.working.size(); i-- > 0 && r.working.times[i] >= 0.9 * t_end;) {
      spread = std::max(spread, distance(curve.space, r.working.points[i], last));
    }
    if (spread < opts.limit_tolerance) {
      result.limit = last;
      extend = true;
    }
  }

  if (profile.lambda < 0.0) {
    switch (result.extension_case) {
      case ExtensionCase::kA:
      case ExtensionCase::kB: result.condition = TransformCondition::kA; break;
      case ExtensionCase::kC: result.condition = TransformCondition::kB; break;
      case ExtensionCase::kD:
        result.condition = extend ? TransformCondition::kC : TransformCondition::kBlocked;
        break;
    }
  } else if (result.extension_case == ExtensionCase::kD && !extend) {
    result.condition = TransformCondition::kBlocked;
  }

  if (extend) {
    const std::size_t ext =
        opts.extension_nodes ? opts.extension_nodes : std::max<std::size_t>(out.size() / 10, 2);
    // Mean spacing of the resolved part, so the constant tail is neither denser nor sparser on average.
    double step = out.size() >= 2 ? out.end_time() / double(out.size() - 1) : 0.0;
    if (!(step > 0.0)) step = curve.size() >= 2 ? curve.end_time() / double(curve.size() - 1) : 1.0;
    const double s_star = map.total_S.value;
    if (s_star > out.end_time() + 1e-12 * std::max(1.0, s_star)) {
      out.times.push_back(s_star);
      out.points.push_back(*result.limit);
    } else {
      out.points.back() = *result.limit;
    }
    const double base = out.end_time();
    for (std::size_t k = 1; k <= ext; ++k) {
      out.times.push_back(base + double(k) * step);
      out.points.push_back(*result.limit);
    }
  }
  attach_values(out, f);
  out.meta.source = "transform";
  if (out.size() >= 3) result.diagnostics.push_back(check_energy_identity(out, f, p_prime, opts.energy_tolerance));
  return result;
}

DualityMeasures measure_duality(const SampledCurve& original, const TransformResult& result, const Functional& f,
                                const ConvexityProfile& profile, const TransformOptions& opts) {
  DualityMeasures m;
  m.reverse = transform_curve(result.transformed, f, result.p_prime, result.p, profile, opts);

  // t*_{u_{p'}}: a curve that never stops on [0, S*) with S* finite has t* = S*.
  const auto transformed_horizon = detect_positivity_horizon(result.transformed, f, opts.eps);
  Extent t_star_transformed = extent_of(transformed_horizon);
  if (t_star_transformed.infinite && !result.time_map.total_S.infinite) {
    t_star_transformed = Extent{result.transformed.end_time(), false};
  }
  m.dual_time_gap = gap(t_star_transformed, result.time_map.total_S);

  const auto original_horizon = detect_positivity_horizon(original, f, opts.eps);
  m.dual_total_gap = gap(m.reverse.time_map.total_S, extent_of(original_horizon));

  const SampledCurve& back = m.reverse.transformed;
  const double t_max = std::min(original.end_time(), back.end_time());
  for (std::size_t i = 0; i < original.size() && original.times[i] <= t_max; ++i) {
    const double d = distance(original.space, original.points[i], back.at(original.times[i]));
    m.roundtrip_sup = std::max(m.roundtrip_sup, d);
    ++m.compared_nodes;
  }
  return m;
}

DiagnosticsReport verify_duality(const SampledCurve& original, const TransformResult& result, const Functional& f,
                                 const ConvexityProfile& profile, double tolerance, const TransformOptions& opts) {
  const auto m = measure_duality(original, result, f, profile, opts);
  const double residuals[] = {m.roundtrip_sup, m.dual_time_gap, m.dual_total_gap};
  return DiagnosticsReport::from_residuals("duality", residuals, tolerance);
}

}  // namespace maxslope
