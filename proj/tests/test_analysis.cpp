#include <cmath>

#include "doctest.h"
#include "maxslope/analysis.hpp"
#include "maxslope/errors.hpp"
#include "maxslope/flow.hpp"

namespace ms = maxslope;

namespace {

double x0(const ms::Point& p) { return std::get<ms::EuclideanPoint>(p).coords.at(0); }

ms::SampledCurve exp_growth(double end, std::size_t nodes) {
  return ms::oracle_flow(ms::Functional::negative_quadratic(1), 2.0, ms::euclidean_point({1.0}),
                         ms::linspace(end, nodes));
}

ms::SampledCurve handmade(std::vector<double> t, const std::vector<double>& x) {
  ms::SampledCurve c;
  c.times = std::move(t);
  for (double v : x) c.points.push_back(ms::euclidean_point({v}));
  return c;
}

}  // namespace

TEST_CASE("metric derivative") {
  const auto c = exp_growth(2.0, 2001);
  const auto md = ms::metric_derivative(c);
  for (std::size_t i = 0; i < c.size(); i += 100) CHECK(std::abs(md[i] - std::exp(c.times[i])) <= 1e-3 * std::exp(c.times[i]));

  const auto n = ms::oracle_flow(ms::Functional::norm_like(), 2.0, ms::euclidean_point({1.0}), ms::linspace(0.8, 81));
  for (double v : ms::metric_derivative(n)) CHECK(v == doctest::Approx(1.0));

  const auto flat = handmade({0.0, 1.0, 2.0}, {3.0, 3.0, 3.0});
  for (double v : ms::metric_derivative(flat)) CHECK(v == 0.0);
  CHECK_THROWS_AS(ms::metric_derivative(handmade({0.0}, {1.0})), ms::DomainError);
}

TEST_CASE("positivity horizon") {
  const auto nl = ms::Functional::norm_like();
  const auto n = ms::oracle_flow(nl, 2.0, ms::euclidean_point({1.0}), ms::linspace(2.0, 201));
  const auto h = ms::detect_positivity_horizon(n, nl);
  REQUIRE_FALSE(h.infinite());
  CHECK(*h.t_star == doctest::Approx(1.0));
  CHECK(h.stopped());

  const auto e = exp_growth(2.0, 201);
  CHECK(ms::detect_positivity_horizon(e, ms::Functional::negative_quadratic(1)).infinite());

  const auto q = ms::Functional::quadratic(1.0, {3.0});
  const auto h0 = ms::detect_positivity_horizon(handmade({0.0, 1.0, 2.0}, {3.0, 3.0, 3.0}), q);
  REQUIRE_FALSE(h0.infinite());
  CHECK(*h0.t_star == 0.0);
}

TEST_CASE("property: the horizon does not grow with eps") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  const auto c = ms::oracle_flow(q, 2.0, ms::euclidean_point({1.0}), ms::linspace(30.0, 3001));
  double previous = INFINITY;
  for (const double eps : {1e-14, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1e-1, 0.5, 2.0}) {
    CAPTURE(eps);
    const auto h = ms::detect_positivity_horizon(c, q, eps);
    const double t = h.infinite() ? INFINITY : *h.t_star;
    REQUIRE(t <= previous);
    previous = t;
  }
  CHECK(previous == 0.0);
}

TEST_CASE("arc-length reparametrization of exponential growth") {
  const auto nq = ms::Functional::negative_quadratic(1);
  const auto c = exp_growth(2.0, 4001);
  const auto r = ms::arc_length_reparametrize(c, nq);
  CHECK(r.map.total_S.value == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-5));
  for (std::size_t i = 0; i < r.curve.size(); i += 200) {
    CHECK(x0(r.curve.points[i]) == doctest::Approx(1.0 + r.curve.times[i]).epsilon(1e-5));
  }
  CHECK(ms::check_lipschitz(r.curve).passed);
  CHECK(ms::check_reparametrized_identity(r.curve, nq).passed);
  CHECK(ms::check_convexity_along_curve(r.curve, nq, nq.profile()).passed);
}

TEST_CASE("arc length is the identity for a unit-speed curve and empty for a constant one") {
  const auto nl = ms::Functional::norm_like();
  const auto n = ms::oracle_flow(nl, 2.0, ms::euclidean_point({1.0}), ms::linspace(2.0, 201));
  const auto r = ms::arc_length_reparametrize(n, nl);
  CHECK(r.map.total_S.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(x0(r.curve.points.back()) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  const auto q = ms::Functional::quadratic(1.0, {3.0});
  CHECK(ms::arc_length_reparametrize(handmade({0.0, 1.0, 2.0}, {3.0, 3.0, 3.0}), q).curve.empty());
}

TEST_CASE("energy identity on exact flows and its first-order decay on discrete ones") {
  const auto nq = ms::Functional::negative_quadratic(1);
  CHECK(ms::check_energy_identity(exp_growth(2.0, 4001), nq, 2.0).passed);

  const auto nl = ms::Functional::norm_like();
  const auto n = ms::oracle_flow(nl, 4.0, ms::euclidean_point({1.0}), ms::linspace(2.0, 2001));
  CHECK(ms::check_energy_identity(n, nl, 4.0).passed);

  const auto q = ms::Functional::quadratic(1.0, {0.0});
  double previous = INFINITY;
  double ratio = 0.0;
  for (const double tau : {2e-2, 1e-2, 5e-3}) {
    const auto c = ms::solve_minimizing_movements(q, 2.0, ms::euclidean_point({1.0}), {.tau = tau, .horizon = 3.0});
    const double res = ms::check_energy_identity(c, q, 2.0, 1.0).max_residual;
    ratio = previous / res;
    CHECK(res < previous);
    previous = res;
  }
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
  CHECK_FALSE(ms::check_energy_identity(
                  ms::solve_minimizing_movements(q, 2.0, ms::euclidean_point({1.0}), {.tau = 0.2, .horizon = 3.0}), q,
                  2.0, 1e-3)
                  .passed);
}

TEST_CASE("checkers detect violations") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  // f(u(s)) oscillates: not convex, and u moves faster than unit speed
  std::vector<double> s, x;
  for (int i = 0; i <= 200; ++i) {
    s.push_back(i / 200.0);
    x.push_back(1.0 + 0.5 * std::sin(8.0 * s.back()));
  }
  const auto c = handmade(s, x);
  CHECK_FALSE(ms::check_convexity_along_curve(c, q, q.profile()).passed);
  const auto lip = ms::check_lipschitz(c);
  CHECK_FALSE(lip.passed);
  CHECK_FALSE(lip.violated_indices.empty());
}

TEST_CASE("regularizing bounds") {
  const auto nl = ms::Functional::norm_like();
  const auto n = ms::oracle_flow(nl, 2.0, ms::euclidean_point({1.0}), ms::linspace(2.0, 201));
  const auto items = ms::regularizing_bound_items(n, nl, 2.0, nl.profile());
  REQUIRE_FALSE(items.empty());
  for (const auto& item : items) {
    CAPTURE(item.name);
    CHECK(item.passed);
  }
  CHECK(ms::check_regularizing_bounds(n, nl, 2.0, nl.profile()).passed);
}

TEST_CASE("slope monotonicity") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  const auto c = ms::solve_minimizing_movements(q, 3.0, ms::euclidean_point({2.0}), {.tau = 1e-2, .horizon = 3.0});
  CHECK(ms::check_slope_monotone(c, q, q.profile()).passed);
  const auto nq = ms::Functional::negative_quadratic(1);
  CHECK_THROWS_AS(ms::check_slope_monotone(exp_growth(1.0, 11), nq, nq.profile()), ms::HypothesisError);
}

TEST_CASE("combined reports") {
  const double a[] = {0.1, 0.3};
  const double b[] = {0.5};
  const ms::DiagnosticsReport parts[] = {ms::DiagnosticsReport::from_residuals("a", a, 1.0),
                                         ms::DiagnosticsReport::from_residuals("b", b, 0.4)};
  CHECK_FALSE(parts[1].passed);
  CHECK(parts[1].violated_indices == std::vector<std::size_t>{0});
  const auto all = ms::combine("all", parts);
  CHECK(all.max_residual == doctest::Approx(0.5));
  CHECK_FALSE(all.passed);
  CHECK(ms::DiagnosticsReport::skipped_check("x", 1.0).skipped);
}
