#include "maxslope/curve.hpp"

#include <algorithm>
#include <cmath>

#include "maxslope/errors.hpp"
#include "maxslope/functional.hpp"

namespace maxslope {

void SampledCurve::validate() const {
  if (times.size() != points.size()) throw DomainError("times and points differ in length");
  if (times.empty()) return;
  if (times.front() != 0.0) throw DomainError("curve times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DomainError("curve times must be strictly increasing");
  }
  for (const auto& cache : {&f_values, &slopes, &metric_derivatives}) {
    if (cache->has_value() && (*cache)->size() != times.size()) {
      throw DomainError("cached values must align with the time grid");
    }
  }
  for (const auto& pt : points) require_valid(space, pt);
}

std::size_t locate(const std::vector<double>& knots, double t) {
  if (knots.size() < 2) return 0;
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  std::size_t idx = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  return std::min(idx, knots.size() - 2);
}

Point SampledCurve::at(double t) const {
  if (times.empty()) throw DomainError("cannot evaluate an empty curve");
  if (times.size() == 1 || t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  const std::size_t i = locate(times, t);
  const double theta = std::clamp((t - times[i]) / (times[i + 1] - times[i]), 0.0, 1.0);
  return geodesic_point(space, points[i], points[i + 1], theta);
}

SampledCurve SampledCurve::prefix(std::size_t count) const {
  count = std::min(count, size());
  SampledCurve out;
  out.space = space;
  out.p = p;
  out.meta = meta;
  out.times.assign(times.begin(), times.begin() + count);
  out.points.assign(points.begin(), points.begin() + count);
  auto cut = [count](const std::optional<std::vector<double>>& v) -> std::optional<std::vector<double>> {
    if (!v) return std::nullopt;
    return std::vector<double>(v->begin(), v->begin() + count);
  };
  out.f_values = cut(f_values);
  out.slopes = cut(slopes);
  out.metric_derivatives = cut(metric_derivatives);
  return out;
}

void attach_values(SampledCurve& curve, const Functional& f) {
  std::vector<double> values, slopes;
  values.reserve(curve.size());
  slopes.reserve(curve.size());
  for (const auto& pt : curve.points) {
    values.push_back(evaluate(f, pt));
    slopes.push_back(slope_analytic(f, pt));
  }
  curve.f_values = std::move(values);
  curve.slopes = std::move(slopes);
  curve.meta.functional_tag = f.tag();
}

std::vector<double> linspace(double end, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {0.0};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = end * double(i) / double(count - 1);
  out.back() = end;
  return out;
}

}  // namespace maxslope
