#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace maxslope {

struct EuclideanPoint {
  std::vector<double> coords;

  friend bool operator==(const EuclideanPoint&, const EuclideanPoint&) = default;
};

/// A point on one of the three half-lines of the tripod. Any point with
/// radius 0 is the origin, whatever its branch tag.
struct TripodPoint {
  int branch = 0;
  double radius = 0.0;
};

using Point = std::variant<EuclideanPoint, TripodPoint>;

struct Euclidean {
  std::size_t dimension = 1;
};

/// Three half-lines glued at a common origin, with the path-length metric.
struct Tripod {};

using MetricSpace = std::variant<Euclidean, Tripod>;

enum class PointErrorKind { kWrongSpace, kDimensionMismatch, kNegativeRadius, kBadBranch, kNonFinite };

struct PointError {
  PointErrorKind kind;
  std::string message;
};

/// Convenience constructors.
Point euclidean_point(std::vector<double> coords);
Point tripod_point(int branch, double radius);
inline Point origin(const MetricSpace& space);

std::string space_name(const MetricSpace& space);

/// Checks the point invariants against `space`; returns nothing when valid.
std::optional<PointError> validate_point(const MetricSpace& space, const Point& p);

/// Throws SpaceMismatch / DomainError when `validate_point` reports a problem.
void require_valid(const MetricSpace& space, const Point& p);

double distance(const MetricSpace& space, const Point& a, const Point& b);

/// The point at fraction `theta` along the (unique) geodesic from a to b, so
/// that d(a, g) = theta d(a, b) and d(g, b) = (1 - theta) d(a, b).
Point geodesic_point(const MetricSpace& space, const Point& a, const Point& b, double theta);

/// Equality up to origin identification on the tripod.
bool same_point(const MetricSpace& space, const Point& a, const Point& b);

/// Maps every zero-radius tripod point to (branch 0, r = 0).
Point canonical(const Point& p);

/// Number of scalar columns used when a point is written to a table, and
/// their names ("x0", "x1", ... or "branch", "radius").
std::vector<std::string> point_field_names(const MetricSpace& space);
std::vector<double> point_fields(const Point& p);

inline Point origin(const MetricSpace& space) {
  if (const auto* e = std::get_if<Euclidean>(&space)) {
    return EuclideanPoint{std::vector<double>(e->dimension, 0.0)};
  }
  return TripodPoint{0, 0.0};
}

}  // namespace maxslope
