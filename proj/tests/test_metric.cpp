#include <cmath>
#include <random>

#include "doctest.h"
#include "maxslope/errors.hpp"
#include "maxslope/metric.hpp"

namespace ms = maxslope;

namespace {

ms::Point random_point(const ms::MetricSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  if (std::holds_alternative<ms::Tripod>(space)) {
    std::uniform_int_distribution<int> b(0, 2);
    return ms::tripod_point(b(rng), std::abs(u(rng)));
  }
  const auto dim = std::get<ms::Euclidean>(space).dimension;
  std::vector<double> x(dim);
  for (auto& c : x) c = u(rng);
  return ms::euclidean_point(std::move(x));
}

}  // namespace

TEST_CASE("euclidean distance") {
  const ms::MetricSpace r2 = ms::Euclidean{2};
  CHECK(ms::distance(r2, ms::euclidean_point({0, 0}), ms::euclidean_point({3, 4})) == doctest::Approx(5.0));
  CHECK(ms::distance(r2, ms::euclidean_point({1, 1}), ms::euclidean_point({1, 1})) == 0.0);
}

TEST_CASE("tripod distance goes through the origin across branches") {
  const ms::MetricSpace t = ms::Tripod{};
  CHECK(ms::distance(t, ms::tripod_point(0, 2.0), ms::tripod_point(1, 3.0)) == doctest::Approx(5.0));
  CHECK(ms::distance(t, ms::tripod_point(2, 2.0), ms::tripod_point(2, 3.5)) == doctest::Approx(1.5));
  // every zero-radius point is the origin
  CHECK(ms::distance(t, ms::tripod_point(1, 0.0), ms::tripod_point(2, 0.0)) == 0.0);
  CHECK(ms::same_point(t, ms::tripod_point(1, 0.0), ms::tripod_point(2, 0.0)));
}

TEST_CASE("geodesic points") {
  const ms::MetricSpace r1 = ms::Euclidean{1};
  const auto g = ms::geodesic_point(r1, ms::euclidean_point({0}), ms::euclidean_point({4}), 0.25);
  CHECK(std::get<ms::EuclideanPoint>(g).coords[0] == doctest::Approx(1.0));

  const ms::MetricSpace t = ms::Tripod{};
  const auto a = ms::tripod_point(0, 2.0);
  const auto b = ms::tripod_point(1, 3.0);
  // at theta = 0.4 the geodesic has travelled 2: exactly the origin
  CHECK(ms::distance(t, ms::geodesic_point(t, a, b, 0.4), ms::tripod_point(0, 0.0)) == doctest::Approx(0.0));
  const auto tp = std::get<ms::TripodPoint>(ms::geodesic_point(t, a, b, 0.8));
  CHECK(tp.branch == 1);
  CHECK(tp.radius == doctest::Approx(2.0));
  CHECK(ms::same_point(t, ms::geodesic_point(t, a, b, 0.0), a));
  CHECK(ms::same_point(t, ms::geodesic_point(t, a, b, 1.0), b));
}

TEST_CASE("invalid points are rejected") {
  const ms::MetricSpace r2 = ms::Euclidean{2};
  const ms::MetricSpace r3 = ms::Euclidean{3};
  CHECK_THROWS_AS(ms::distance(r3, ms::euclidean_point({1, 2}), ms::euclidean_point({1, 2, 3})), ms::Error);
  CHECK_THROWS_AS(ms::distance(r2, ms::tripod_point(0, 1.0), ms::euclidean_point({0, 0})), ms::SpaceMismatch);

  const ms::MetricSpace t = ms::Tripod{};
  auto err = ms::validate_point(t, ms::tripod_point(0, -1.0));
  REQUIRE(err.has_value());
  CHECK(err->kind == ms::PointErrorKind::kNegativeRadius);
  err = ms::validate_point(t, ms::tripod_point(3, 1.0));
  REQUIRE(err.has_value());
  CHECK(err->kind == ms::PointErrorKind::kBadBranch);
  err = ms::validate_point(r2, ms::euclidean_point({0, NAN}));
  REQUIRE(err.has_value());
  CHECK(err->kind == ms::PointErrorKind::kNonFinite);
  CHECK_FALSE(ms::validate_point(r2, ms::euclidean_point({0, 1})).has_value());
}

TEST_CASE("property: metric axioms and the geodesic property on random triples") {
  std::mt19937_64 rng(20240611);
  for (const ms::MetricSpace space : {ms::MetricSpace{ms::Euclidean{1}}, ms::MetricSpace{ms::Euclidean{3}},
                                      ms::MetricSpace{ms::Tripod{}}}) {
    CAPTURE(ms::space_name(space));
    std::uniform_real_distribution<double> theta(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
      const auto a = random_point(space, rng);
      const auto b = random_point(space, rng);
      const auto c = random_point(space, rng);
      const double ab = ms::distance(space, a, b);
      REQUIRE(ab >= 0.0);
      REQUIRE(ab == doctest::Approx(ms::distance(space, b, a)));
      REQUIRE(ab <= ms::distance(space, a, c) + ms::distance(space, c, b) + 1e-12);

      const double th = theta(rng);
      const auto g = ms::geodesic_point(space, a, b, th);
      REQUIRE(ms::distance(space, a, g) == doctest::Approx(th * ab).epsilon(1e-12).scale(1.0));
      REQUIRE(ms::distance(space, g, b) == doctest::Approx((1.0 - th) * ab).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("table fields") {
  CHECK(ms::point_field_names(ms::Euclidean{2}) == std::vector<std::string>{"x0", "x1"});
  CHECK(ms::point_field_names(ms::Tripod{}) == std::vector<std::string>{"branch", "radius"});
  CHECK(ms::point_fields(ms::tripod_point(2, 1.5)) == std::vector<double>{2.0, 1.5});
}
