#include "maxslope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

// Speeds on nodes [first, last] of the curve, treated as a standalone curve.
void segment_speeds(const SampledCurve& c, std::size_t first, std::size_t last, std::vector<double>& out) {
  const std::size_t n = last - first + 1;
  const auto& t = c.times;
  auto d = [&](std::size_t i, std::size_t j) { return distance(c.space, c.points[i], c.points[j]); };
  if (n == 1) {
    out[first] = 0.0;
    return;
  }
  if (n == 2) {
    const double v = d(first, last) / (t[last] - t[first]);
    out[first] = v;
    out[last] = v;
    return;
  }
  for (std::size_t i = first + 1; i < last; ++i) out[i] = d(i - 1, i + 1) / (t[i + 1] - t[i - 1]);
  // One-sided, second order: eliminate the O(h) term between the one- and two-step quotients.
  auto one_sided = [&](std::size_t a, std::size_t b, std::size_t c2) {
    const double h1 = std::abs(t[b] - t[a]);
    const double h2 = std::abs(t[c2] - t[b]);
    const double d1 = d(a, b) / h1;
    const double d2 = d(a, c2) / (h1 + h2);
    return std::max(0.0, (d1 * (h1 + h2) - d2 * h1) / h2);
  };
  out[first] = one_sided(first, first + 1, first + 2);
  out[last] = one_sided(last, last - 1, last - 2);
}

// Central differences of a scalar sequence on nodes [first, last]; NaN at the ends.
void segment_derivative(const std::vector<double>& t, const std::vector<double>& y, std::size_t first,
                        std::size_t last, std::vector<double>& out) {
  for (std::size_t i = first + 1; i < last; ++i) out[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
}

double relative(double residual, double scale) { return residual / std::max(1.0, scale); }

std::vector<std::size_t> thinned_indices(std::size_t n, std::size_t max_nodes) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  if (n <= max_nodes) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
  }
  for (std::size_t k = 0; k < max_nodes; ++k) idx.push_back(k * (n - 1) / (max_nodes - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::optional<std::size_t> break_index(const SampledCurve& curve, const Functional& f) {
  const auto h = detect_positivity_horizon(curve, f);
  if (h.infinite() || h.index == 0 || h.index >= curve.size() - 1) return std::nullopt;
  return h.index;
}

}  // namespace

DiagnosticsReport DiagnosticsReport::from_residuals(std::string name, std::span<const double> residuals,
                                                    double tolerance) {
  DiagnosticsReport r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double v = residuals[i];
    if (std::isnan(v)) continue;
    r.max_residual = std::max(r.max_residual, v);
    sum += v;
    ++count;
    if (v > tolerance) r.violated_indices.push_back(i);
  }
  r.mean_residual = count ? sum / double(count) : 0.0;
  r.passed = r.max_residual <= tolerance;
  return r;
}

DiagnosticsReport DiagnosticsReport::skipped_check(std::string name, double tolerance) {
  DiagnosticsReport r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  r.skipped = true;
  return r;
}

DiagnosticsReport combine(std::string name, std::span<const DiagnosticsReport> parts) {
  DiagnosticsReport r;
  r.name = std::move(name);
  r.tolerance = parts.empty() ? 0.0 : parts.front().tolerance;
  double mean_sum = 0.0;
  std::size_t used = 0;
  bool all_skipped = true;
  for (const auto& part : parts) {
    r.tolerance = std::min(r.tolerance, part.tolerance);
    if (part.skipped) continue;
    all_skipped = false;
    r.max_residual = std::max(r.max_residual, part.max_residual);
    mean_sum += part.mean_residual;
    ++used;
    r.passed = r.passed && part.passed;
    r.violated_indices.insert(r.violated_indices.end(), part.violated_indices.begin(), part.violated_indices.end());
    if (part.margin) r.margin = r.margin ? std::min(*r.margin, *part.margin) : *part.margin;
  }
  std::sort(r.violated_indices.begin(), r.violated_indices.end());
  r.violated_indices.erase(std::unique(r.violated_indices.begin(), r.violated_indices.end()), r.violated_indices.end());
  r.mean_residual = used ? mean_sum / double(used) : 0.0;
  r.skipped = all_skipped && !parts.empty();
  return r;
}

std::vector<double> metric_derivative(const SampledCurve& curve) {
  if (curve.size() < 2) throw DomainError("metric derivative needs at least 2 points");
  std::vector<double> out(curve.size(), 0.0);
  segment_speeds(curve, 0, curve.size() - 1, out);
  return out;
}

std::vector<double> metric_derivative_split(const SampledCurve& curve, std::size_t k) {
  if (curve.size() < 2) throw DomainError("metric derivative needs at least 2 points");
  const std::size_t n = curve.size();
  if (k == 0 || k >= n - 1) return metric_derivative(curve);
  std::vector<double> out(n, 0.0);
  segment_speeds(curve, k, n - 1, out);
  segment_speeds(curve, 0, k, out);
  return out;
}

std::vector<double> curve_slopes(const SampledCurve& curve, const Functional& f) {
  if (curve.slopes) return *curve.slopes;
  std::vector<double> out;
  out.reserve(curve.size());
  for (const auto& pt : curve.points) out.push_back(slope_analytic(f, pt));
  return out;
}

std::vector<double> curve_values(const SampledCurve& curve, const Functional& f) {
  if (curve.f_values) return *curve.f_values;
  std::vector<double> out;
  out.reserve(curve.size());
  for (const auto& pt : curve.points) out.push_back(evaluate(f, pt));
  return out;
}

PositivityHorizon detect_positivity_horizon(const SampledCurve& curve, const Functional& f, double eps) {
  PositivityHorizon h;
  const std::size_t n = curve.size();
  if (n == 0) {
    h.t_star = 0.0;
    h.stationary_tail = true;
    return h;
  }
  const auto slopes = curve_slopes(curve, f);

  // A run of identical trailing nodes starting at a critical point: t* is
  // where the run starts. Exact equality keeps a slowly decaying tail, whose
  // last samples can sit within any fixed tolerance of each other, out of it.
  std::size_t rest = n - 1;
  while (rest > 0 && distance(curve.space, curve.points[rest - 1], curve.points[n - 1]) == 0.0) {
    --rest;
  }
  if (rest < n - 1 && slopes[rest] <= eps) {
    h.index = rest;
    h.t_star = curve.times[rest];
    h.stationary_tail = true;
    return h;
  }

  // Otherwise the slope decides; a finite t* found this way may still move.
  std::size_t idx = 0;  // one past the last node with slope > eps
  for (std::size_t i = n; i-- > 0;) {
    if (slopes[i] > eps) {
      idx = i + 1;
      break;
    }
  }
  if (idx == n) {
    h.index = n;
    return h;
  }
  h.index = idx;
  h.t_star = curve.times[idx];
  h.stationary_tail = true;
  for (std::size_t i = idx + 1; i < n; ++i) {
    if (distance(curve.space, curve.points[i], curve.points[idx]) > kStationaryTolerance) {
      h.stationary_tail = false;
      break;
    }
  }
  return h;
}

ArcLengthResult arc_length_reparametrize(const SampledCurve& curve, const Functional& f, std::size_t samples,
                                         double eps) {
  ArcLengthResult out;
  out.map.alpha = 1.0;
  out.map.knots_t = {0.0};
  out.map.knots_s = {0.0};
  out.curve.space = curve.space;
  out.curve.p = curve.p;
  out.curve.meta = curve.meta;
  out.curve.meta.source = "arc_length";

  const auto horizon = detect_positivity_horizon(curve, f, eps);
  if (curve.size() < 2 || (horizon.stopped() && horizon.index == 0)) return out;

  const SampledCurve working = horizon.stopped() ? curve.prefix(horizon.index + 1) : curve;
  if (working.size() < 2) return out;
  const auto speeds = metric_derivative(working);
  out.map = integrate_speed_power(working.times, speeds, 1.0, horizon.stopped());
  const auto& map = out.map;
  out.curve = resample_through(working, map, samples ? samples : working.size());
  out.curve.meta.source = "arc_length";
  if (!out.curve.empty()) attach_values(out.curve, f);
  return out;
}

DiagnosticsReport check_lipschitz(const SampledCurve& curve, double tolerance) {
  const std::size_t n = curve.size();
  std::vector<double> residual(n, 0.0);
  for (std::size_t stride = 1; stride < n; stride *= 2) {
    for (std::size_t i = 0; i + stride < n; ++i) {
      const double d = distance(curve.space, curve.points[i], curve.points[i + stride]);
      const double gap = curve.times[i + stride] - curve.times[i];
      residual[i] = std::max(residual[i], d - gap);
    }
  }
  return DiagnosticsReport::from_residuals("lipschitz", residual, tolerance);
}

DiagnosticsReport check_energy_identity(const SampledCurve& curve, const Functional& f, double p, double tolerance) {
  const std::string name = "energy_identity";
  const std::size_t n = curve.size();
  if (n < 3) return DiagnosticsReport::skipped_check(name, tolerance);
  const double q = conjugate(p);
  const auto k = break_index(curve, f);
  const auto speeds = k ? metric_derivative_split(curve, *k) : metric_derivative(curve);
  const auto values = curve_values(curve, f);
  const auto slopes = curve_slopes(curve, f);

  std::vector<double> dfdt(n, std::nan(""));
  if (k) {
    segment_derivative(curve.times, values, 0, *k, dfdt);
    segment_derivative(curve.times, values, *k, n - 1, dfdt);
  } else {
    segment_derivative(curve.times, values, 0, n - 1, dfdt);
  }

  std::vector<double> residual(n, std::nan(""));
  for (std::size_t i = 0; i < n; ++i) {
    if (k && i == *k) continue;  // t* itself: the identity holds only almost everywhere
    const double kinetic = std::pow(speeds[i], p);
    const double potential = std::pow(slopes[i], q);
    const double scale = std::max(kinetic, potential);
    double r = relative(std::abs(kinetic - potential), scale);
    if (!std::isnan(dfdt[i])) {
      r = std::max(r, relative(std::abs(dfdt[i] + kinetic / p + potential / q), scale));
    }
    residual[i] = r;
  }
  return DiagnosticsReport::from_residuals(name, residual, tolerance);
}

DiagnosticsReport check_reparametrized_identity(const SampledCurve& reparam, const Functional& f, double tolerance) {
  const std::string name = "reparametrized_identity";
  const std::size_t n = reparam.size();
  if (n < 3) return DiagnosticsReport::skipped_check(name, tolerance);
  const auto values = curve_values(reparam, f);
  const auto slopes = curve_slopes(reparam, f);
  std::vector<double> dg(n, std::nan(""));
  segment_derivative(reparam.times, values, 0, n - 1, dg);
  std::vector<double> residual(n, std::nan(""));
  for (std::size_t i = 1; i + 1 < n; ++i) residual[i] = relative(std::abs(dg[i] + slopes[i]), slopes[i]);
  return DiagnosticsReport::from_residuals(name, residual, tolerance);
}

DiagnosticsReport check_convexity_along_curve(const SampledCurve& reparam, const Functional& f,
                                              const ConvexityProfile& profile, double tolerance) {
  const std::string name = "convexity_along_curve";
  const std::size_t n = reparam.size();
  std::vector<double> residual(n, 0.0);
  if (n < 3) return DiagnosticsReport::from_residuals(name, residual, tolerance);
  const auto g = curve_values(reparam, f);
  const auto& s = reparam.times;
  const double lambda_minus = profile.lambda_minus();
  constexpr double kWindow = 1.0;

  auto defect = [&](std::size_t a, std::size_t m, std::size_t b) {
    const double width = s[b] - s[a];
    const double theta = (s[m] - s[a]) / width;
    const double bound = (1.0 - theta) * g[a] + theta * g[b] + lambda_minus * theta * (1.0 - theta) * width * width;
    return std::max(0.0, g[m] - bound);
  };

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i + 1] - s[i - 1] <= kWindow) residual[i] = std::max(residual[i], defect(i - 1, i, i + 1));
  }

  // Windows of width <= 1 tiled with 50% overlap; all triples of a thinned grid inside each.
  constexpr std::size_t kNodesPerWindow = 48;
  const double total = s.back();
  const double width = std::min(kWindow, total);
  for (double start = 0.0;; start += width / 2.0) {
    const auto lo = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), start) - s.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), start + width) - s.begin());
    if (hi > lo + 2) {
      auto local = thinned_indices(hi - lo, kNodesPerWindow);
      for (auto& v : local) v += lo;
      for (std::size_t a = 0; a < local.size(); ++a) {
        for (std::size_t b = a + 2; b < local.size(); ++b) {
          for (std::size_t m = a + 1; m < b; ++m) {
            residual[local[m]] = std::max(residual[local[m]], defect(local[a], local[m], local[b]));
          }
        }
      }
    }
    if (start + width >= total) break;
  }
  return DiagnosticsReport::from_residuals(name, residual, tolerance);
}

std::vector<DiagnosticsReport> regularizing_bound_items(const SampledCurve& curve, const Functional& f, double p,
                                                        const ConvexityProfile& profile, double tolerance) {
  std::vector<DiagnosticsReport> items;
  const double q = conjugate(p);
  const std::size_t n = curve.size();
  const auto values = curve_values(curve, f);
  const auto slopes = curve_slopes(curve, f);
  const auto inf = f.infimum();

  auto pairwise = [&](const std::string& name, std::size_t max_nodes, auto&& rhs_of) {
    const auto idx = thinned_indices(n, max_nodes);
    std::vector<double> residual(n, 0.0);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const std::size_t i = idx[a], j = idx[b];
        const auto [lhs, rhs] = rhs_of(i, j);
        residual[j] = std::max(residual[j], lhs - rhs);
        margin = std::min(margin, rhs - lhs);
      }
    }
    auto report = DiagnosticsReport::from_residuals(name, residual, tolerance);
    if (std::isfinite(margin)) report.margin = margin;
    return report;
  };

  if (profile.lambda >= 0.0 && inf) {
    items.push_back(pairwise("regularizing_slope_vs_infimum", 400, [&](std::size_t i, std::size_t j) {
      const double dt = curve.times[j] - curve.times[i];
      return std::pair{std::pow(slopes[j], q), (values[i] - *inf) / dt};
    }));
  } else {
    items.push_back(DiagnosticsReport::skipped_check("regularizing_slope_vs_infimum", tolerance));
  }

  if (profile.lambda >= 0.0) {
    items.push_back(pairwise("regularizing_slope_vs_envelope", 150, [&](std::size_t i, std::size_t j) {
      const double dt = curve.times[j] - curve.times[i];
      const double envelope = moreau_envelope(f, p, dt, curve.points[i]);
      return std::pair{std::pow(slopes[j], q) / q, (values[i] - envelope) / dt};
    }));
  } else {
    items.push_back(DiagnosticsReport::skipped_check("regularizing_slope_vs_envelope", tolerance));
  }

  const auto minimizer = f.minimizer();
  if (profile.lambda > 0.0 && minimizer) {
    const double p0 = profile.p0;
    const double q0 = conjugate(p0);
    const double f_min = evaluate(f, *minimizer);
    std::vector<double> residual(n, 0.0);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) {
      const double gap = values[i] - f_min;
      const double lower = profile.lambda * std::pow(distance(curve.space, curve.points[i], *minimizer), p0);
      const double upper = std::pow(slopes[i], q0) / (q0 * std::pow(profile.lambda, q0 / p0));
      residual[i] = std::max(lower - gap, gap - upper);
      margin = std::min({margin, gap - lower, upper - gap});
    }
    auto report = DiagnosticsReport::from_residuals("regularizing_minimizer_bounds", residual, tolerance);
    if (std::isfinite(margin)) report.margin = margin;
    items.push_back(report);
  } else {
    items.push_back(DiagnosticsReport::skipped_check("regularizing_minimizer_bounds", tolerance));
  }
  return items;
}

DiagnosticsReport check_regularizing_bounds(const SampledCurve& curve, const Functional& f, double p,
                                            const ConvexityProfile& profile, double tolerance) {
  const auto items = regularizing_bound_items(curve, f, p, profile, tolerance);
  return combine("regularizing_bounds", items);
}

DiagnosticsReport check_slope_monotone(const SampledCurve& curve, const Functional& f,
                                       const ConvexityProfile& profile, double tolerance) {
  if (profile.lambda < 0.0) {
    throw HypothesisError("slope monotonicity along the flow is only guaranteed for lambda >= 0");
  }
  const auto slopes = curve_slopes(curve, f);
  std::vector<double> residual(slopes.size(), 0.0);
  for (std::size_t i = 1; i < slopes.size(); ++i) residual[i] = std::max(0.0, slopes[i] - slopes[i - 1]);
  return DiagnosticsReport::from_residuals("slope_monotone", residual, tolerance);
}

double convexity_defect(const Functional& f, const ConvexityProfile& profile, const Point& v0, const Point& v1,
                        double theta) {
  const Point g = geodesic_point(f.space(), v0, v1, theta);
  const double d = distance(f.space(), v0, v1);
  const double bound = (1.0 - theta) * evaluate(f, v0) + theta * evaluate(f, v1) -
                       profile.lambda * theta * (1.0 - profile.psi(theta)) * std::pow(d, profile.p0);
  return std::max(0.0, evaluate(f, g) - bound);
}

}  // namespace maxslope
