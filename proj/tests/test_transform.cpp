#include <cmath>
#include <random>

#include "doctest.h"
#include "maxslope/errors.hpp"
#include "maxslope/flow.hpp"
#include "maxslope/transform.hpp"

namespace ms = maxslope;

namespace {

double x0(const ms::Point& p) { return std::get<ms::EuclideanPoint>(p).coords.at(0); }

ms::SampledCurve decay(double end, std::size_t nodes) {
  return ms::oracle_flow(ms::Functional::quadratic(1.0, {0.0}), 2.0, ms::euclidean_point({1.0}),
                         ms::linspace(end, nodes));
}

}  // namespace

TEST_CASE("exponent of the time change") {
  CHECK(ms::alpha(2.0, 2.0) == 0.0);
  CHECK(ms::alpha(2.0, 4.0) == doctest::Approx(2.0 / 3.0));
  CHECK(ms::alpha(2.0, 1.5) == doctest::Approx(-1.0));
  CHECK(ms::alpha(2.0, 3.0) == doctest::Approx(0.5));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.0001, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng), q = u(rng);
    const double a = ms::alpha(p, q);
    REQUIRE(a < 1.0);
    // the reverse transformation has exponent -a / (1 - a)
    REQUIRE(ms::alpha(q, p) == doctest::Approx(-a / (1.0 - a)));
  }
  CHECK_THROWS_AS(ms::alpha(2.0, 1.0), ms::DomainError);
}

TEST_CASE("transform hypotheses") {
  const auto convex = ms::Functional::quadratic(1.0, {0.0}).profile();
  CHECK_NOTHROW(ms::check_transform_hypotheses(convex, 2.0, 7.0));
  const auto concave = ms::Functional::negative_quadratic(1).profile();
  CHECK_NOTHROW(ms::check_transform_hypotheses(concave, 2.0, 1.5));
  CHECK_NOTHROW(ms::check_transform_hypotheses(concave, 2.0, 2.0));
  CHECK_THROWS_AS(ms::check_transform_hypotheses(concave, 2.0, 3.0), ms::HypothesisError);
  CHECK_THROWS_AS(ms::check_transform_hypotheses(concave, 3.0, 1.5), ms::HypothesisError);
  auto sharper = concave;
  sharper.p0 = 4.0;
  CHECK_NOTHROW(ms::check_transform_hypotheses(sharper, 2.0, 3.0));
}

TEST_CASE("time maps and their inverses") {
  const auto nq = ms::Functional::negative_quadratic(1);
  const auto c = ms::oracle_flow(nq, 2.0, ms::euclidean_point({1.0}), ms::linspace(12.0, 12001));
  const auto m = ms::forward_time_map(c, nq, 2.0, 1.5);
  CHECK(m.alpha == doctest::Approx(-1.0));
  CHECK_FALSE(m.total_S.infinite);
  CHECK(m.total_S.value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(m.domain_end.infinite);
  for (std::size_t i = 0; i < m.size(); i += 1000) {
    CHECK(m.knots_s[i] == doctest::Approx(1.0 - std::exp(-m.knots_t[i])).epsilon(1e-5));
  }

  const auto inv = ms::invert_time_map(m);
  CHECK(inv.alpha == doctest::Approx(0.5));
  CHECK(inv.knots_t == m.knots_s);
  CHECK(inv.forward(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-5));

  const auto twice = ms::invert_time_map(inv);
  CHECK(twice.knots_t == m.knots_t);
  CHECK(twice.knots_s == m.knots_s);
  CHECK(twice.alpha == doctest::Approx(m.alpha));

  for (std::size_t i = 0; i < m.size(); i += 37) {
    REQUIRE(m.forward(m.inverse(m.knots_s[i])) == doctest::Approx(m.knots_s[i]).epsilon(1e-10));
  }

  ms::TimeMap bad;
  bad.knots_t = {0.0, 1.0, 1.0};
  bad.knots_s = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), ms::DomainError);
}

TEST_CASE("exponential decay transformed to other exponents") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  const auto c = decay(30.0, 30001);
  struct Case {
    double p_prime;
    ms::ExtensionCase expected;
    double (*exact)(double);
  };
  const Case cases[] = {
      {4.0, ms::ExtensionCase::kD, [](double s) { return std::pow(std::max(0.0, 1.0 - 2.0 * s / 3.0), 1.5); }},
      {3.0, ms::ExtensionCase::kD, [](double s) { return std::pow(std::max(0.0, 1.0 - s / 2.0), 2.0); }},
      {1.5, ms::ExtensionCase::kA, [](double s) { return 1.0 / (1.0 + s); }},
  };
  for (const auto& [pp, expected, exact] : cases) {
    CAPTURE(pp);
    const auto r = ms::transform_curve(c, q, 2.0, pp, q.profile());
    CHECK(r.extension_case == expected);
    CHECK(r.condition == ms::TransformCondition::kNotRequired);
    CHECK(r.transformed.p == pp);
    if (expected == ms::ExtensionCase::kD) {
      CHECK(r.time_map.total_S.value == doctest::Approx(1.0 / ms::alpha(2.0, pp)).epsilon(1e-3));
      REQUIRE(r.limit.has_value());
      CHECK(std::abs(x0(*r.limit)) <= 1e-6);
    } else {
      CHECK(r.time_map.total_S.infinite);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < r.transformed.size(); ++i) {
      err = std::max(err, std::abs(x0(r.transformed.points[i]) - exact(r.transformed.times[i])));
    }
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("same exponent and unit speed give the identity") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  const auto c = decay(5.0, 501);
  const auto same = ms::transform_curve(c, q, 2.0, 2.0, q.profile());
  REQUIRE(same.transformed.size() >= c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    REQUIRE(same.transformed.times[i] == doctest::Approx(c.times[i]).epsilon(1e-12));
    REQUIRE(ms::distance(q.space(), same.transformed.points[i], c.points[i]) <= 1e-12);
  }

  const auto nl = ms::Functional::norm_like();
  const auto n = ms::oracle_flow(nl, 2.0, ms::euclidean_point({1.0}), ms::linspace(2.0, 201));
  const auto r = ms::transform_curve(n, nl, 2.0, 4.0, nl.profile());
  CHECK(r.extension_case == ms::ExtensionCase::kC);
  CHECK(r.time_map.total_S.value == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 0; i < r.transformed.size(); ++i) {
    const double s = r.transformed.times[i];
    REQUIRE(x0(r.transformed.points[i]) == doctest::Approx(std::max(0.0, 1.0 - s)).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("exponential growth to a smaller exponent is blocked") {
  const auto nq = ms::Functional::negative_quadratic(1);
  const auto c = ms::oracle_flow(nq, 2.0, ms::euclidean_point({1.0}), ms::linspace(10.0, 10001));
  const auto r = ms::transform_curve(c, nq, 2.0, 1.5, nq.profile());
  CHECK(r.extension_case == ms::ExtensionCase::kD);
  CHECK(r.blocked());
  CHECK_FALSE(r.limit.has_value());
  CHECK(r.time_map.total_S.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(ms::transform_curve(c, nq, 2.0, 3.0, nq.profile()), ms::HypothesisError);
}

TEST_CASE("duality round trip") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  const auto c = decay(30.0, 30001);
  const auto r = ms::transform_curve(c, q, 2.0, 4.0, q.profile());
  const auto d = ms::measure_duality(c, r, q, q.profile());
  CHECK(d.compared_nodes > 100);
  CHECK(d.roundtrip_sup <= 1e-4);
  CHECK(d.reverse.p_prime == 2.0);
  CHECK(ms::verify_duality(c, r, q, q.profile()).passed);
}

TEST_CASE("composition on image knots") {
  const auto c = decay(1.0, 11);
  ms::TimeMap m;
  m.knots_t = c.times;
  for (double t : c.times) m.knots_s.push_back(2.0 * t);
  const auto out = ms::compose_on_knots(c, m);
  REQUIRE(out.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(out.times[i] == doctest::Approx(2.0 * c.times[i]));
    CHECK(x0(out.points[i]) == x0(c.points[i]));
  }
  const auto uniform = ms::resample_through(c, m, 5);
  REQUIRE(uniform.size() == 5);
  CHECK(uniform.end_time() == doctest::Approx(2.0));
  CHECK(x0(uniform.points.back()) == doctest::Approx(std::exp(-1.0)));
}
