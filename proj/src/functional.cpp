#include "maxslope/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_exponent(double p, const char* what) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << what << " must lie in (1, inf), got " << p;
    throw DomainError(msg.str());
  }
}

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

// Gradient of f on R^n; a subgradient (sign) for NormLike.
std::vector<double> euclidean_gradient(const Functional& f, const std::vector<double>& x) {
  return std::visit(
      overloaded{
          [&](const Quadratic& q) {
            std::vector<double> g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = q.scale * (x[i] - q.center[i]);
            return g;
          },
          [&](const NegativeQuadratic&) {
            std::vector<double> g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = -x[i];
            return g;
          },
          [&](const NormLike&) {
            return std::vector<double>{x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0)};
          },
          [&](const DistanceToPoint&) -> std::vector<double> {
            throw SpaceMismatch("distance_to_point lives on the tripod");
          },
      },
      f.kind());
}

Point proximal_euclidean(const Functional& f, double p, double tau, const EuclideanPoint& v) {
  const double weight = 1.0 / std::pow(tau, p - 1.0);
  const std::size_t n = v.coords.size();

  auto objective = [&](const std::vector<double>& w) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (w[i] - v.coords[i]) * (w[i] - v.coords[i]);
    return evaluate(f, EuclideanPoint{w}) + weight * std::pow(std::sqrt(d2), p) / p;
  };
  auto gradient = [&](const std::vector<double>& w) {
    auto g = euclidean_gradient(f, w);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = w[i] - v.coords[i];
    const double r = norm(diff);
    if (r > 0.0) {
      const double factor = weight * std::pow(r, p - 2.0);
      for (std::size_t i = 0; i < n; ++i) g[i] += factor * diff[i];
    }
    return g;
  };

  constexpr int kMaxIterations = 100000;
  constexpr double kStepTolerance = 1e-14;
  constexpr double kArmijo = 1e-4;

  std::vector<double> w = v.coords;
  double value = objective(w);
  std::vector<double> g = gradient(w);
  // The penalty has no curvature at v when p > 2, so a step scaled by its
  // weight can be far too short; backtracking shrinks a unit step instead.
  double step = 1.0;
  std::vector<double> trial(n);

  for (int it = 0; it < kMaxIterations; ++it) {
    const double gnorm = norm(g);
    if (gnorm == 0.0) return EuclideanPoint{w};

    double eta = step;
    double trial_value = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = w[i] - eta * g[i];
      trial_value = objective(trial);
      if (trial_value <= value - kArmijo * eta * gnorm * gnorm) break;
      eta *= 0.5;
      if (eta * gnorm < 1e-18) {
        // No further decrease representable: w is stationary to working precision.
        return EuclideanPoint{w};
      }
    }

    std::vector<double> g_new = gradient(trial);
    double ss = 0.0, sy = 0.0, moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = trial[i] - w[i];
      ss += s * s;
      sy += s * (g_new[i] - g[i]);
    }
    moved = std::sqrt(ss);
    w = trial;
    value = trial_value;
    g = std::move(g_new);
    if (moved < kStepTolerance * (1.0 + norm(w))) return EuclideanPoint{w};
    // Barzilai-Borwein step for the next iteration; fall back to growth.
    step = sy > 0.0 ? ss / sy : 2.0 * eta;
  }
  throw SolverError("proximal descent did not converge within 1e5 iterations");
}

// Golden-section minimization of a unimodal function on [lo, hi].
template <class F>
double golden_section(F&& phi, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = phi(c), fd = phi(d);
  const double tol = 1e-14 * (1.0 + std::abs(hi));
  for (int it = 0; it < 500 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = phi(d);
    }
  }
  return 0.5 * (a + b);
}

Point proximal_tripod(const Functional& f, double p, double tau, const TripodPoint& v) {
  const auto reference = std::get<TripodPoint>(f.reference_point());
  const double r_max = v.radius + reference.radius + 1.0;

  Point best = canonical(v);
  double best_value = proximal_objective(f, p, tau, v, best);
  for (int branch = 0; branch < 3; ++branch) {
    auto phi = [&](double r) { return proximal_objective(f, p, tau, v, TripodPoint{branch, r}); };
    const double r = golden_section(phi, 0.0, r_max);
    for (double candidate : {r, 0.0}) {
      const Point w = tripod_point(branch, candidate);
      const double value = proximal_objective(f, p, tau, v, w);
      if (value < best_value) {
        best_value = value;
        best = w;
      }
    }
  }
  return best;
}

void require_in_space(const Functional& f, const Point& v) { require_valid(f.space(), v); }

}  // namespace

double ConvexityProfile::psi(double t) const {
  return psi_family == PsiFamily::kLinear ? t : std::pow(t, p0 - 1.0);
}

double conjugate(double p) {
  require_exponent(p, "exponent");
  return p / (p - 1.0);
}

Functional Functional::quadratic(double scale, std::vector<double> center) {
  if (!(scale > 0.0)) throw DomainError("quadratic scale must be positive");
  if (center.empty()) throw DomainError("quadratic center must have at least one coordinate");
  const Euclidean space{center.size()};
  // f(g_t) = (1-t) f(g_0) + t f(g_1) - (scale/2) t (1-t) d^2 along segments.
  return Functional(Quadratic{scale, std::move(center)}, space, ConvexityProfile{2.0, scale / 2.0, PsiFamily::kLinear});
}

Functional Functional::negative_quadratic(std::size_t dimension) {
  if (dimension == 0) throw DomainError("dimension must be positive");
  return Functional(NegativeQuadratic{dimension}, Euclidean{dimension},
                    ConvexityProfile{2.0, -2.0, PsiFamily::kLinear});
}

Functional Functional::norm_like() {
  return Functional(NormLike{}, Euclidean{1}, ConvexityProfile{2.0, 0.0, PsiFamily::kLinear});
}

Functional Functional::distance_to_point(TripodPoint anchor) {
  const Tripod space;
  require_valid(space, anchor);
  return Functional(DistanceToPoint{std::get<TripodPoint>(canonical(anchor))}, space,
                    ConvexityProfile{2.0, 0.0, PsiFamily::kLinear});
}

std::string Functional::tag() const {
  return std::visit(overloaded{
                        [](const Quadratic&) { return std::string("quadratic"); },
                        [](const NegativeQuadratic&) { return std::string("negative_quadratic"); },
                        [](const NormLike&) { return std::string("norm_like"); },
                        [](const DistanceToPoint&) { return std::string("distance_to_point"); },
                    },
                    kind_);
}

Functional Functional::with_profile(ConvexityProfile profile) const {
  require_exponent(profile.p0, "p0");
  Functional copy = *this;
  copy.profile_ = profile;
  return copy;
}

std::optional<double> Functional::infimum() const {
  if (std::holds_alternative<NegativeQuadratic>(kind_)) return std::nullopt;
  return 0.0;
}

std::optional<Point> Functional::minimizer() const {
  return std::visit(overloaded{
                        [](const Quadratic& q) -> std::optional<Point> { return EuclideanPoint{q.center}; },
                        [](const NegativeQuadratic&) -> std::optional<Point> { return std::nullopt; },
                        [](const NormLike&) -> std::optional<Point> { return EuclideanPoint{{0.0}}; },
                        [](const DistanceToPoint& d) -> std::optional<Point> { return d.anchor; },
                    },
                    kind_);
}

Point Functional::reference_point() const {
  if (auto m = minimizer()) return *m;
  return origin(space_);
}

double evaluate(const Functional& f, const Point& v) {
  require_in_space(f, v);
  return std::visit(
      overloaded{
          [&](const Quadratic& q) {
            const double d = distance(f.space(), v, EuclideanPoint{q.center});
            return q.scale * d * d / 2.0;
          },
          [&](const NegativeQuadratic&) {
            const double r = norm(std::get<EuclideanPoint>(v).coords);
            return -r * r / 2.0;
          },
          [&](const NormLike&) { return std::abs(std::get<EuclideanPoint>(v).coords[0]); },
          [&](const DistanceToPoint& d) { return distance(f.space(), v, d.anchor); },
      },
      f.kind());
}

double slope_analytic(const Functional& f, const Point& v) {
  require_in_space(f, v);
  return std::visit(
      overloaded{
          [&](const Quadratic& q) { return q.scale * distance(f.space(), v, EuclideanPoint{q.center}); },
          [&](const NegativeQuadratic&) { return norm(std::get<EuclideanPoint>(v).coords); },
          // No descent direction exists at the minimum, so the positive part vanishes there.
          [&](const NormLike&) { return std::get<EuclideanPoint>(v).coords[0] == 0.0 ? 0.0 : 1.0; },
          [&](const DistanceToPoint& d) { return same_point(f.space(), v, d.anchor) ? 0.0 : 1.0; },
      },
      f.kind());
}

double slope_global_formula(const Functional& f, const Point& v, std::span<const Point> candidates) {
  require_in_space(f, v);
  const auto& profile = f.profile();
  const double lambda_minus = profile.lambda_minus();
  const double fv = evaluate(f, v);
  bool any = false;
  double best = 0.0;
  for (const Point& w : candidates) {
    const double d = distance(f.space(), v, w);
    if (d == 0.0) continue;
    any = true;
    const double value = (fv - evaluate(f, w)) / d - lambda_minus * std::pow(d, profile.p0 - 1.0);
    best = std::max(best, value);
  }
  if (!any) throw DomainError("candidate set contains no point distinct from v");
  return best;
}

std::vector<Point> default_candidates(const Functional& f, const Point& v, const CandidateOptions& opts) {
  require_in_space(f, v);
  const Point reference = f.reference_point();
  const double radius = 8.0 * std::max(1.0, distance(f.space(), v, reference));
  std::vector<Point> out;
  out.reserve(opts.grid_points + opts.near_points + 8);

  const std::size_t near_per_direction = std::max<std::size_t>(1, opts.near_points / 2);
  auto log_step = [&](std::size_t k) {
    // Distances from 1e-9 up to the ball radius.
    const double lo = std::log(1e-9), hi = std::log(radius);
    const double frac = near_per_direction == 1 ? 0.0 : double(k) / double(near_per_direction - 1);
    return std::exp(lo + frac * (hi - lo));
  };

  if (const auto* e = std::get_if<Euclidean>(&f.space())) {
    const auto& c = std::get<EuclideanPoint>(reference).coords;
    const auto& x = std::get<EuclideanPoint>(v).coords;
    if (e->dimension == 1) {
      for (std::size_t i = 0; i < opts.grid_points; ++i) {
        const double frac = opts.grid_points == 1 ? 0.5 : double(i) / double(opts.grid_points - 1);
        out.push_back(EuclideanPoint{{c[0] - radius + 2.0 * radius * frac}});
      }
      for (std::size_t k = 0; k < near_per_direction; ++k) {
        const double h = log_step(k);
        out.push_back(EuclideanPoint{{x[0] + h}});
        out.push_back(EuclideanPoint{{x[0] - h}});
      }
      return out;
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = e->dimension;
    for (std::size_t i = 0; i < opts.grid_points; ++i) {
      std::vector<double> dir(n);
      for (auto& d : dir) d = gauss(rng);
      const double len = norm(dir);
      const double r = radius * std::pow(unit(rng), 1.0 / double(n));
      std::vector<double> w(n);
      for (std::size_t j = 0; j < n; ++j) w[j] = c[j] + r * dir[j] / len;
      out.push_back(EuclideanPoint{std::move(w)});
    }
    // Directions for the near cloud: coordinate axes and the ray towards the reference.
    std::vector<std::vector<double>> directions;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> axis(n, 0.0);
      axis[j] = 1.0;
      directions.push_back(axis);
    }
    std::vector<double> towards(n);
    for (std::size_t j = 0; j < n; ++j) towards[j] = c[j] - x[j];
    if (const double len = norm(towards); len > 0.0) {
      for (auto& t : towards) t /= len;
      directions.push_back(towards);
    }
    const std::size_t per_dir = std::max<std::size_t>(1, opts.near_points / (2 * directions.size()));
    for (const auto& dir : directions) {
      for (std::size_t k = 0; k < per_dir; ++k) {
        const double h = log_step(k * near_per_direction / per_dir);
        std::vector<double> plus(n), minus(n);
        for (std::size_t j = 0; j < n; ++j) {
          plus[j] = x[j] + h * dir[j];
          minus[j] = x[j] - h * dir[j];
        }
        out.push_back(EuclideanPoint{std::move(plus)});
        out.push_back(EuclideanPoint{std::move(minus)});
      }
    }
    return out;
  }

  const auto& t = std::get<TripodPoint>(v);
  const std::size_t per_branch = std::max<std::size_t>(1, opts.grid_points / 3);
  out.push_back(TripodPoint{0, 0.0});
  for (int b = 0; b < 3; ++b) {
    for (std::size_t i = 1; i <= per_branch; ++i) {
      out.push_back(TripodPoint{b, radius * double(i) / double(per_branch)});
    }
  }
  for (std::size_t k = 0; k < near_per_direction; ++k) {
    const double h = log_step(k);
    if (t.radius == 0.0) {
      for (int b = 0; b < 3; ++b) out.push_back(TripodPoint{b, h});
    } else {
      out.push_back(TripodPoint{t.branch, t.radius + h});
      out.push_back(h <= t.radius ? tripod_point(t.branch, t.radius - h) : tripod_point((t.branch + 1) % 3, h - t.radius));
    }
  }
  return out;
}

double proximal_objective(const Functional& f, double p, double tau, const Point& v, const Point& w) {
  const double d = distance(f.space(), w, v);
  return evaluate(f, w) + std::pow(d, p) / (p * std::pow(tau, p - 1.0));
}

void require_well_posed(const Functional& f, double p, double tau) {
  require_exponent(p, "exponent p");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("time step tau must be positive and finite");
  const auto& profile = f.profile();
  const double lambda_minus = profile.lambda_minus();
  if (lambda_minus == 0.0) return;
  if (p > profile.p0) {
    std::ostringstream msg;
    msg << "lambda < 0 requires p <= p0 = " << profile.p0 << ", got p = " << p;
    throw HypothesisError(msg.str());
  }
  if (p < profile.p0) {
    std::ostringstream msg;
    msg << "F_p is not coercive for lambda < 0 and p < p0 = " << profile.p0 << " (p = " << p << ")";
    throw HypothesisError(msg.str());
  }
  if (!(std::pow(tau, p - 1.0) < 1.0 / lambda_minus)) {
    std::ostringstream msg;
    msg << "tau = " << tau << " outside the well-posedness window tau^(p-1) < 1/lambda^- = " << 1.0 / lambda_minus;
    throw HypothesisError(msg.str());
  }
}

Point proximal(const Functional& f, double p, double tau, const Point& v) {
  require_well_posed(f, p, tau);
  require_in_space(f, v);
  return std::visit(
      overloaded{
          [&](const Quadratic& q) -> Point {
            if (p != 2.0) return proximal_numeric(f, p, tau, v);
            const auto& x = std::get<EuclideanPoint>(v).coords;
            const double ct = q.scale * tau;
            std::vector<double> w(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) w[i] = (q.center[i] * ct + x[i]) / (1.0 + ct);
            return EuclideanPoint{std::move(w)};
          },
          [&](const NegativeQuadratic&) -> Point {
            // Stationarity -w + (w - v)/tau = 0; p = 2 is enforced by require_well_posed.
            const auto& x = std::get<EuclideanPoint>(v).coords;
            std::vector<double> w(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) w[i] = x[i] / (1.0 - tau);
            return EuclideanPoint{std::move(w)};
          },
          [&](const NormLike&) -> Point {
            // |w - v| = tau at any interior stationary point, for every p.
            const double x = std::get<EuclideanPoint>(v).coords[0];
            const double shrunk = std::max(std::abs(x) - tau, 0.0);
            return EuclideanPoint{{x >= 0.0 ? shrunk : -shrunk}};
          },
          [&](const DistanceToPoint& d) -> Point {
            const double dist = distance(f.space(), v, d.anchor);
            if (dist <= tau) return d.anchor;
            return geodesic_point(f.space(), v, d.anchor, tau / dist);
          },
      },
      f.kind());
}

Point proximal_numeric(const Functional& f, double p, double tau, const Point& v) {
  require_well_posed(f, p, tau);
  require_in_space(f, v);
  if (const auto* e = std::get_if<EuclideanPoint>(&v)) return proximal_euclidean(f, p, tau, *e);
  return proximal_tripod(f, p, tau, std::get<TripodPoint>(v));
}

double moreau_envelope(const Functional& f, double p, double t, const Point& v) {
  const Point w = proximal(f, p, t, v);
  return proximal_objective(f, p, t, v, w);
}

}  // namespace maxslope
