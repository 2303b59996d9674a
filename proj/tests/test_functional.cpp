#include <cmath>
#include <random>

#include "doctest.h"
#include "maxslope/analysis.hpp"
#include "maxslope/errors.hpp"
#include "maxslope/functional.hpp"

namespace ms = maxslope;

namespace {

double x0(const ms::Point& p) { return std::get<ms::EuclideanPoint>(p).coords.at(0); }

// Root of a monotone increasing scalar function by plain bisection.
template <class F>
double bisect(F g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("evaluation") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  CHECK(ms::evaluate(q, ms::euclidean_point({3.0})) == doctest::Approx(4.5));
  const auto nq = ms::Functional::negative_quadratic(2);
  CHECK(ms::evaluate(nq, ms::euclidean_point({3.0, 4.0})) == doctest::Approx(-12.5));
  const auto n = ms::Functional::norm_like();
  CHECK(ms::evaluate(n, ms::euclidean_point({-2.0})) == doctest::Approx(2.0));
  const auto d = ms::Functional::distance_to_point(ms::TripodPoint{1, 1.0});
  CHECK(ms::evaluate(d, ms::tripod_point(0, 2.0)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(ms::evaluate(q, ms::tripod_point(0, 1.0)), ms::SpaceMismatch);
}

TEST_CASE("declared profiles") {
  // the profile carries no 1/2: c |x|^2 / 2 is (2, c/2)-convex, and -|x|^2/2 is declared with lambda = -2
  CHECK(ms::Functional::quadratic(2.0, {0.0}).profile().lambda == doctest::Approx(1.0));
  CHECK(ms::Functional::negative_quadratic(1).profile().lambda == doctest::Approx(-2.0));
  CHECK(ms::Functional::negative_quadratic(1).profile().lambda_minus() == doctest::Approx(2.0));
  const auto relaxed = ms::Functional::quadratic(2.0, {0.0}).with_profile({2.0, 0.0, ms::PsiFamily::kLinear});
  CHECK(relaxed.profile().lambda == 0.0);
  CHECK(ms::Functional::norm_like().profile().lambda == 0.0);
  CHECK(ms::Functional::distance_to_point(ms::TripodPoint{0, 0.0}).profile().lambda == 0.0);
}

TEST_CASE("analytic slopes") {
  CHECK(ms::slope_analytic(ms::Functional::quadratic(1.0, {0.0}), ms::euclidean_point({3.0})) == doctest::Approx(3.0));
  CHECK(ms::slope_analytic(ms::Functional::quadratic(2.0, {1.0}), ms::euclidean_point({-1.0})) ==
        doctest::Approx(4.0));
  CHECK(ms::slope_analytic(ms::Functional::negative_quadratic(2), ms::euclidean_point({3.0, 4.0})) ==
        doctest::Approx(5.0));
  const auto n = ms::Functional::norm_like();
  CHECK(ms::slope_analytic(n, ms::euclidean_point({-0.5})) == doctest::Approx(1.0));
  // descending slope at the minimizer is zero
  CHECK(ms::slope_analytic(n, ms::euclidean_point({0.0})) == 0.0);
  const auto d = ms::Functional::distance_to_point(ms::TripodPoint{2, 1.0});
  CHECK(ms::slope_analytic(d, ms::tripod_point(0, 1.0)) == doctest::Approx(1.0));
  CHECK(ms::slope_analytic(d, ms::tripod_point(2, 1.0)) == 0.0);
}

TEST_CASE("global slope formula converges to the analytic slope") {
  struct Case {
    ms::Functional f;
    double v;
  };
  const Case cases[] = {{ms::Functional::quadratic(1.0, {0.0}), 2.0},
                        {ms::Functional::negative_quadratic(1), 1.0},
                        {ms::Functional::norm_like(), -1.5}};
  for (const auto& [f, v] : cases) {
    CAPTURE(f.tag());
    std::vector<ms::Point> grid;
    const std::size_t n = 10000;
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(ms::euclidean_point({-5.0 + 10.0 * i / n}));
    const auto p = ms::euclidean_point({v});
    const double exact = ms::slope_analytic(f, p);
    const double estimate = ms::slope_global_formula(f, p, grid);
    CHECK(std::abs(estimate - exact) <= 1e-2);
    // a coarser grid is never closer from above
    std::vector<ms::Point> coarse;
    for (std::size_t i = 0; i <= n; i += 100) coarse.push_back(grid[i]);
    CHECK(ms::slope_global_formula(f, p, coarse) <= estimate + 1e-12);
  }
}

TEST_CASE("global slope with default candidates on the tripod") {
  const auto d = ms::Functional::distance_to_point(ms::TripodPoint{1, 2.0});
  const auto v = ms::tripod_point(0, 1.0);
  const auto cand = ms::default_candidates(d, v, {.grid_points = 4096, .near_points = 1024, .seed = 3});
  CHECK(ms::slope_global_formula(d, v, cand) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("closed-form proximal steps") {
  const auto q = ms::Functional::quadratic(1.0, {0.0});
  CHECK(x0(ms::proximal(q, 2.0, 1.0, ms::euclidean_point({2.0}))) == doctest::Approx(1.0));
  const auto n = ms::Functional::norm_like();
  CHECK(x0(ms::proximal(n, 2.0, 0.5, ms::euclidean_point({2.0}))) == doctest::Approx(1.5));
  CHECK(x0(ms::proximal(n, 2.0, 0.5, ms::euclidean_point({0.3}))) == doctest::Approx(0.0));
  const auto nq = ms::Functional::negative_quadratic(1);
  CHECK(x0(ms::proximal(nq, 2.0, 0.25, ms::euclidean_point({1.0}))) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("moreau envelope values") {
  CHECK(ms::moreau_envelope(ms::Functional::quadratic(1.0, {0.0}), 2.0, 1.0, ms::euclidean_point({2.0})) ==
        doctest::Approx(1.0));
  CHECK(ms::moreau_envelope(ms::Functional::norm_like(), 2.0, 0.5, ms::euclidean_point({2.0})) ==
        doctest::Approx(1.75));
}

TEST_CASE("ill-posed proximal steps are refused") {
  const auto nq = ms::Functional::negative_quadratic(1);
  CHECK_THROWS_AS(ms::require_well_posed(nq, 2.0, 0.5), ms::HypothesisError);
  CHECK_THROWS_AS(ms::proximal(nq, 2.0, 1.0, ms::euclidean_point({1.0})), ms::HypothesisError);
  CHECK_NOTHROW(ms::require_well_posed(nq, 2.0, 0.49));
  // F_p loses coercivity below the convexity exponent
  CHECK_THROWS_AS(ms::require_well_posed(nq, 1.5, 0.1), ms::HypothesisError);
  CHECK_THROWS_AS(ms::require_well_posed(ms::Functional::quadratic(1.0, {0.0}), 2.0, 0.0), ms::Error);
}

TEST_CASE("numeric proximal step against a bisection oracle") {
  // f = |x - 1|^2 / 2, p = 3: the minimizer solves (w - 1) + sign(w - v)|w - v|^2 / tau^2 = 0
  const auto q = ms::Functional::quadratic(1.0, {1.0});
  for (const double v : {-2.0, 0.5, 3.0}) {
    for (const double tau : {0.1, 0.5, 1.0}) {
      CAPTURE(v);
      CAPTURE(tau);
      const double p = 3.0;
      const double w_star = bisect(
          [&](double w) { return (w - 1.0) + std::copysign(std::pow(std::abs(w - v), p - 1.0), w - v) / std::pow(tau, p - 1.0); },
          -10.0, 10.0);
      CHECK(x0(ms::proximal_numeric(q, p, tau, ms::euclidean_point({v}))) == doctest::Approx(w_star).epsilon(1e-6));
      CHECK(x0(ms::proximal(q, p, tau, ms::euclidean_point({v}))) == doctest::Approx(w_star).epsilon(1e-6));
    }
  }
  // p > 2 close to the minimizer, where the penalty is flat around v
  for (const double v : {9.18e-4, 1e-6}) {
    CAPTURE(v);
    const double tau = 1e-3;
    const double w_star =
        bisect([&](double w) { return w - std::pow(v - w, 3.0) / std::pow(tau, 3.0); }, 0.0, v);
    CHECK(x0(ms::proximal_numeric(ms::Functional::quadratic(1.0, {0.0}), 4.0, tau, ms::euclidean_point({v}))) ==
          doctest::Approx(w_star).epsilon(1e-8));
  }
  // the numeric solver agrees with the closed form where one exists
  const auto nq = ms::Functional::negative_quadratic(1);
  CHECK(x0(ms::proximal_numeric(nq, 2.0, 0.25, ms::euclidean_point({1.0}))) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  const auto d = ms::Functional::distance_to_point(ms::TripodPoint{1, 2.0});
  const auto v = ms::tripod_point(0, 1.0);
  const auto a = ms::proximal(d, 2.0, 0.5, v);
  const auto b = ms::proximal_numeric(d, 2.0, 0.5, v);
  CHECK(ms::distance(ms::Tripod{}, a, b) <= 1e-6);
  CHECK(ms::distance(ms::Tripod{}, a, v) == doctest::Approx(0.5));
}

TEST_CASE("property: proximal optimality, envelope bound and profile sampling") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ms::Functional fs[] = {ms::Functional::quadratic(1.5, {0.5}), ms::Functional::negative_quadratic(1),
                               ms::Functional::norm_like()};
  for (const auto& f : fs) {
    CAPTURE(f.tag());
    for (int trial = 0; trial < 200; ++trial) {
      const auto v = ms::euclidean_point({u(rng)});
      const double tau = 0.05 + 0.4 * unit(rng);
      const double p = 2.0;
      const auto w = ms::proximal(f, p, tau, v);
      const double fw = ms::proximal_objective(f, p, tau, v, w);
      // global minimality against random competitors
      for (int k = 0; k < 20; ++k) {
        REQUIRE(fw <= ms::proximal_objective(f, p, tau, v, ms::euclidean_point({u(rng)})) + 1e-12);
      }
      // f_tau <= f, and the step does not increase f
      REQUIRE(ms::moreau_envelope(f, p, tau, v) <= ms::evaluate(f, v) + 1e-12);
      REQUIRE(ms::evaluate(f, w) <= ms::evaluate(f, v) + 1e-12);

      const auto v1 = ms::euclidean_point({u(rng)});
      REQUIRE(ms::convexity_defect(f, f.profile(), v, v1, unit(rng)) <= 1e-12);
    }
  }
}

TEST_CASE("conjugate exponents") {
  CHECK(ms::conjugate(2.0) == doctest::Approx(2.0));
  CHECK(ms::conjugate(4.0) == doctest::Approx(4.0 / 3.0));
  CHECK(ms::conjugate(1.5) == doctest::Approx(3.0));
}
