#include "maxslope/time_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1 || x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const std::size_t i = locate(xs, x);
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

// Least-squares slope of log(y) against log(x) over the given samples.
std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 3) return std::nullopt;
  const double denom = double(n) * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  return (double(n) * sxy - sx * sy) / denom;
}

double integrand(double speed, double alpha) {
  if (alpha == 0.0) return 1.0;
  return std::pow(speed, alpha);
}

}  // namespace

double TimeMap::forward(double t) const { return interpolate(knots_t, knots_s, t); }

double TimeMap::inverse(double s) const { return interpolate(knots_s, knots_t, s); }

void TimeMap::validate() const {
  if (knots_t.size() != knots_s.size()) throw DomainError("time map knots differ in length");
  if (knots_t.empty()) throw DomainError("time map has no knots");
  if (knots_t.front() != 0.0 || knots_s.front() != 0.0) throw DomainError("time map must start at (0, 0)");
  for (std::size_t i = 1; i < knots_t.size(); ++i) {
    if (!(knots_t[i] > knots_t[i - 1]) || !(knots_s[i] > knots_s[i - 1])) {
      throw DomainError("time map knots must be strictly increasing");
    }
  }
}

TimeMap invert_time_map(const TimeMap& map) {
  TimeMap out;
  out.knots_t = map.knots_s;
  out.knots_s = map.knots_t;
  out.total_S = map.domain_end;
  out.domain_end = map.total_S;
  out.alpha = -map.alpha / (1.0 - map.alpha);
  return out;
}

TimeMap integrate_speed_power(const std::vector<double>& times, const std::vector<double>& speeds, double alpha,
                              bool horizon_finite, const TailOptions& opts) {
  if (times.size() != speeds.size()) throw DomainError("times and speeds differ in length");
  if (!(alpha <= 1.0)) throw DomainError("time-change exponent must be <= 1");
  TimeMap map;
  map.alpha = alpha;
  if (times.empty()) throw DomainError("cannot integrate over an empty grid");
  const std::size_t m = times.size();
  map.domain_end = Extent{times.back(), !horizon_finite};
  map.knots_t.push_back(0.0);
  map.knots_s.push_back(0.0);
  if (m == 1) return map;

  // Nodes whose integrand must be finite and positive: everything except a
  // finite horizon node, where the speed may legitimately vanish.
  const std::size_t regular = horizon_finite ? m - 1 : m;
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) g[i] = integrand(speeds[i], alpha);
  if (alpha < 0.0) {
    for (std::size_t i = 0; i < regular; ++i) {
      if (!(speeds[i] > 0.0)) {
        throw DomainError("metric derivative vanishes at t = " + std::to_string(times[i]) +
                          " inside [0, t*) while the exponent is negative");
      }
    }
  }

  double s = 0.0;
  for (std::size_t i = 1; i < regular; ++i) {
    s += 0.5 * (g[i - 1] + g[i]) * (times[i] - times[i - 1]);
    map.knots_t.push_back(times[i]);
    map.knots_s.push_back(s);
  }

  if (horizon_finite) {
    const double t_star = times[m - 1];
    const double last = times[m - 2];
    const double h = t_star - last;
    if (alpha >= 0.0) {
      s += 0.5 * (g[m - 2] + g[m - 1]) * h;
      map.knots_t.push_back(t_star);
      map.knots_s.push_back(s);
      map.total_S = Extent{s, false};
      return map;
    }
    // Negative exponent: fit g ~ C (t* - t)^k over one decade of t* - t that
    // starts well away from t*. The last cells only show how the grid was
    // cut off; a truncated approach to a limit looks like a regular end there.
    const double lo = std::max(1e-3 * t_star, 10.0 * h);
    std::vector<double> dist, vals;
    for (std::size_t i = m - 1; i-- > 0;) {
      const double delta = t_star - times[i];
      if (delta > 10.0 * lo) break;
      if (delta < lo) continue;
      dist.push_back(delta);
      vals.push_back(g[i]);
    }
    const auto k = log_log_slope(dist, vals);
    double exponent = k.value_or(0.0);
    if (!k && !std::isfinite(g[m - 1])) exponent = -1.0;
    if (exponent > -1.0 + opts.margin) {
      s += g[m - 2] * h / (exponent + 1.0);
      map.knots_t.push_back(t_star);
      map.knots_s.push_back(s);
      map.total_S = Extent{s, false};
    } else {
      map.total_S = Extent{s, true};
    }
    return map;
  }

  // Horizon beyond the grid: decide integrability of the tail from the last decade.
  const double t_end = times.back();
  std::vector<double> decade_t, decade_g, local_t, local_g;
  for (std::size_t i = 0; i < m; ++i) {
    if (times[i] >= 0.1 * t_end) {
      decade_t.push_back(times[i]);
      decade_g.push_back(g[i]);
    }
    if (times[i] >= 0.9 * t_end) {
      local_t.push_back(times[i]);
      local_g.push_back(g[i]);
    }
  }
  const bool all_zero =
      std::all_of(decade_g.begin(), decade_g.end(), [](double v) { return v == 0.0; }) && !decade_g.empty();
  if (all_zero) {
    map.total_S = Extent{s, false};
    return map;
  }
  const auto k_decade = log_log_slope(decade_t, decade_g);
  if (!k_decade || !(*k_decade < -1.0 - opts.margin)) {
    map.total_S = Extent{s, true};
    return map;
  }
  double k_local = log_log_slope(local_t, local_g).value_or(*k_decade);
  if (!(k_local < -1.0)) k_local = *k_decade;
  const double tail = g[m - 1] * t_end / (-k_local - 1.0);
  map.total_S = Extent{s + tail, false};
  return map;
}

SampledCurve compose_on_knots(const SampledCurve& curve, const TimeMap& map) {
  SampledCurve out;
  out.space = curve.space;
  out.p = curve.p;
  out.meta = curve.meta;
  if (map.empty()) return out;
  if (map.size() > curve.size()) throw DomainError("time map has more knots than the curve");
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!out.times.empty() && !(map.knots_s[i] > out.times.back())) continue;
    out.times.push_back(map.knots_s[i]);
    out.points.push_back(curve.points[i]);
  }
  return out;
}

SampledCurve resample_through(const SampledCurve& curve, const TimeMap& map, std::size_t samples) {
  SampledCurve out;
  out.space = curve.space;
  out.p = curve.p;
  out.meta = curve.meta;
  if (map.empty() || samples < 2) return out;
  const double s_end = map.knots_s.back();
  out.times = linspace(s_end, samples);
  out.points.reserve(samples);
  for (double s : out.times) out.points.push_back(curve.at(map.inverse(s)));
  return out;
}

}  // namespace maxslope
