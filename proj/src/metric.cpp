#include "maxslope/metric.hpp"

#include <cmath>
#include <sstream>

#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double euclidean_distance(const EuclideanPoint& a, const EuclideanPoint& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const double diff = a.coords[i] - b.coords[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double tripod_distance(const TripodPoint& a, const TripodPoint& b) {
  if (a.radius == 0.0 || b.radius == 0.0 || a.branch == b.branch) {
    return std::abs(a.radius - b.radius);
  }
  return a.radius + b.radius;
}

}  // namespace

Point euclidean_point(std::vector<double> coords) { return EuclideanPoint{std::move(coords)}; }

Point tripod_point(int branch, double radius) { return canonical(TripodPoint{branch, radius}); }

std::string space_name(const MetricSpace& space) {
  return std::holds_alternative<Euclidean>(space) ? "euclidean" : "tripod";
}

std::optional<PointError> validate_point(const MetricSpace& space, const Point& p) {
  return std::visit(
      overloaded{
          [](const Euclidean& e, const EuclideanPoint& x) -> std::optional<PointError> {
            if (x.coords.size() != e.dimension) {
              std::ostringstream msg;
              msg << "dimension mismatch: point has " << x.coords.size() << " coordinates, space has dimension "
                  << e.dimension;
              return PointError{PointErrorKind::kDimensionMismatch, msg.str()};
            }
            for (double c : x.coords) {
              if (!std::isfinite(c)) return PointError{PointErrorKind::kNonFinite, "non-finite coordinate"};
            }
            return std::nullopt;
          },
          [](const Tripod&, const TripodPoint& x) -> std::optional<PointError> {
            if (x.branch < 0 || x.branch > 2) {
              return PointError{PointErrorKind::kBadBranch,
                                "invalid branch index " + std::to_string(x.branch) + " (expected 0, 1 or 2)"};
            }
            if (!std::isfinite(x.radius)) return PointError{PointErrorKind::kNonFinite, "non-finite radius"};
            if (x.radius < 0.0) return PointError{PointErrorKind::kNegativeRadius, "negative radius"};
            return std::nullopt;
          },
          [](const Euclidean&, const TripodPoint&) -> std::optional<PointError> {
            return PointError{PointErrorKind::kWrongSpace, "tripod point given for a euclidean space"};
          },
          [](const Tripod&, const EuclideanPoint&) -> std::optional<PointError> {
            return PointError{PointErrorKind::kWrongSpace, "euclidean point given for the tripod"};
          },
      },
      space, p);
}

void require_valid(const MetricSpace& space, const Point& p) {
  if (auto err = validate_point(space, p)) {
    switch (err->kind) {
      case PointErrorKind::kWrongSpace:
      case PointErrorKind::kDimensionMismatch:
        throw SpaceMismatch(err->message);
      default:
        throw DomainError(err->message);
    }
  }
}

double distance(const MetricSpace& space, const Point& a, const Point& b) {
  require_valid(space, a);
  require_valid(space, b);
  if (std::holds_alternative<Euclidean>(space)) {
    return euclidean_distance(std::get<EuclideanPoint>(a), std::get<EuclideanPoint>(b));
  }
  return tripod_distance(std::get<TripodPoint>(a), std::get<TripodPoint>(b));
}

Point geodesic_point(const MetricSpace& space, const Point& a, const Point& b, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("geodesic parameter outside [0, 1]");
  require_valid(space, a);
  require_valid(space, b);
  if (theta == 0.0) return a;
  if (theta == 1.0) return b;

  if (std::holds_alternative<Euclidean>(space)) {
    const auto& x = std::get<EuclideanPoint>(a).coords;
    const auto& y = std::get<EuclideanPoint>(b).coords;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (1.0 - theta) * x[i] + theta * y[i];
    return EuclideanPoint{std::move(out)};
  }

  const auto& x = std::get<TripodPoint>(a);
  const auto& y = std::get<TripodPoint>(b);
  if (x.radius == 0.0 || y.radius == 0.0 || x.branch == y.branch) {
    // Both points lie on one closed half-line.
    const int branch = x.radius == 0.0 ? y.branch : x.branch;
    return canonical(TripodPoint{branch, (1.0 - theta) * x.radius + theta * y.radius});
  }
  const double travelled = theta * (x.radius + y.radius);
  if (travelled <= x.radius) return canonical(TripodPoint{x.branch, x.radius - travelled});
  return canonical(TripodPoint{y.branch, travelled - x.radius});
}

bool same_point(const MetricSpace& space, const Point& a, const Point& b) { return distance(space, a, b) == 0.0; }

Point canonical(const Point& p) {
  if (const auto* t = std::get_if<TripodPoint>(&p); t && t->radius == 0.0) return TripodPoint{0, 0.0};
  return p;
}

std::vector<std::string> point_field_names(const MetricSpace& space) {
  if (const auto* e = std::get_if<Euclidean>(&space)) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < e->dimension; ++i) names.push_back("x" + std::to_string(i));
    return names;
  }
  return {"branch", "radius"};
}

std::vector<double> point_fields(const Point& p) {
  if (const auto* e = std::get_if<EuclideanPoint>(&p)) return e->coords;
  const auto& t = std::get<TripodPoint>(p);
  return {static_cast<double>(t.branch), t.radius};
}

}  // namespace maxslope
