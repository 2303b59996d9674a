#include "maxslope/flow.hpp"

#include <cmath>
#include <sstream>

#include "maxslope/errors.hpp"

namespace maxslope {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kTauFloor = 1e-7;

bool is_origin(const Point& p) {
  if (const auto* e = std::get_if<EuclideanPoint>(&p)) {
    for (double c : e->coords) {
      if (c != 0.0) return false;
    }
    return true;
  }
  return std::get<TripodPoint>(p).radius == 0.0;
}

// Radius along the ray from the minimizer for f = c r^2/2: r' = -(c r)^beta, beta = 1/(p-1).
double quadratic_radius(double c, double p, double r0, double t) {
  const double beta = 1.0 / (p - 1.0);
  if (p == 2.0) return r0 * std::exp(-c * t);
  const double base = std::pow(r0, 1.0 - beta) - (1.0 - beta) * std::pow(c, beta) * t;
  if (beta < 1.0) return base <= 0.0 ? 0.0 : std::pow(base, 1.0 / (1.0 - beta));
  return std::pow(base, 1.0 / (1.0 - beta));
}

void require_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) throw DomainError("oracle grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("oracle grid must be strictly increasing");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("solver tau must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("solver horizon must be positive");
  if (!(blow_up_radius > 0.0)) throw DomainError("blow-up radius must be positive");
  if (horizon / tau > double(max_steps) + 0.5) {
    std::ostringstream msg;
    msg << "horizon / tau = " << horizon / tau << " exceeds max_steps = " << max_steps;
    throw DomainError(msg.str());
  }
}

std::size_t SolverConfig::steps() const {
  return static_cast<std::size_t>(std::ceil(horizon / tau - 1e-9));
}

SampledCurve solve_minimizing_movements(const Functional& f, double p, const Point& u0, const SolverConfig& cfg) {
  cfg.validate();
  require_well_posed(f, p, cfg.tau);
  require_valid(f.space(), u0);

  SampledCurve curve;
  curve.space = f.space();
  curve.p = p;
  curve.meta.source = "solver";
  curve.meta.functional_tag = f.tag();
  curve.meta.tau = cfg.tau;

  std::vector<double> values, slopes;
  auto push = [&](double t, const Point& v) {
    curve.times.push_back(t);
    curve.points.push_back(v);
    values.push_back(evaluate(f, v));
    slopes.push_back(slope_analytic(f, v));
  };

  push(0.0, u0);
  const std::size_t n = cfg.steps();
  Point current = u0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (cfg.stop_on_critical && slopes.back() < kCriticalSlope) {
      curve.meta.critical_stop = true;
      break;
    }
    current = proximal(f, p, cfg.tau, current);
    push(double(k) * cfg.tau, current);
    if (distance(f.space(), u0, current) > cfg.blow_up_radius) {
      curve.meta.blow_up = true;
      break;
    }
  }
  curve.f_values = std::move(values);
  curve.slopes = std::move(slopes);
  return curve;
}

bool has_oracle(const Functional& f, double p, const Point& u0) {
  if (!(p > 1.0)) return false;
  return std::visit(overloaded{
                        [&](const Quadratic&) { return true; },
                        [&](const NegativeQuadratic& nq) {
                          if (p == 2.0) return true;
                          return is_origin(u0) && (p < 2.0 || nq.dimension <= 2);
                        },
                        [&](const NormLike&) { return true; },
                        [&](const DistanceToPoint&) { return true; },
                    },
                    f.kind());
}

SampledCurve oracle_flow(const Functional& f, double p, const Point& u0, const std::vector<double>& grid,
                         const OracleOptions& opts) {
  require_valid(f.space(), u0);
  require_grid(grid);
  if (!has_oracle(f, p, u0)) {
    std::ostringstream msg;
    msg << "no closed-form flow registered for " << f.tag() << " with p = " << p;
    throw DomainError(msg.str());
  }

  SampledCurve curve;
  curve.space = f.space();
  curve.p = p;
  curve.times = grid;
  curve.meta.source = "oracle";
  curve.meta.functional_tag = f.tag();
  curve.points.reserve(grid.size());

  std::visit(
      overloaded{
          [&](const Quadratic& q) {
            const auto& x = std::get<EuclideanPoint>(u0).coords;
            const double r0 = distance(f.space(), u0, EuclideanPoint{q.center});
            for (double t : grid) {
              const double r = r0 == 0.0 ? 0.0 : quadratic_radius(q.scale, p, r0, t);
              std::vector<double> w(x.size());
              for (std::size_t i = 0; i < x.size(); ++i) {
                w[i] = r0 == 0.0 ? q.center[i] : q.center[i] + (x[i] - q.center[i]) * (r / r0);
              }
              curve.points.push_back(EuclideanPoint{std::move(w)});
            }
          },
          [&](const NegativeQuadratic& nq) {
            const auto& x = std::get<EuclideanPoint>(u0).coords;
            if (!is_origin(u0)) {  // p == 2
              for (double t : grid) {
                std::vector<double> w(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) w[i] = x[i] * std::exp(t);
                curve.points.push_back(EuclideanPoint{std::move(w)});
              }
              return;
            }
            if (p <= 2.0) {
              curve.points.assign(grid.size(), u0);
              return;
            }
            // |u'| = |u|^(1/(p-1)) from a critical point: r(t) = (alpha t)^(1/alpha), alpha = 1 - q/p.
            const double alpha = 1.0 - conjugate(p) / p;
            std::vector<double> dir(nq.dimension, 0.0);
            if (nq.dimension == 1) {
              dir[0] = std::cos(opts.theta) >= 0.0 ? 1.0 : -1.0;
            } else {
              dir[0] = std::cos(opts.theta);
              dir[1] = std::sin(opts.theta);
            }
            for (double t : grid) {
              const double r = std::pow(alpha * t, 1.0 / alpha);
              std::vector<double> w(nq.dimension);
              for (std::size_t i = 0; i < w.size(); ++i) w[i] = r * dir[i];
              curve.points.push_back(EuclideanPoint{std::move(w)});
            }
          },
          [&](const NormLike&) {
            const double x = std::get<EuclideanPoint>(u0).coords[0];
            for (double t : grid) {
              const double r = std::max(std::abs(x) - t, 0.0);
              curve.points.push_back(EuclideanPoint{{x >= 0.0 ? r : -r}});
            }
          },
          [&](const DistanceToPoint& d) {
            const double total = distance(f.space(), u0, d.anchor);
            for (double t : grid) {
              if (t >= total) {
                curve.points.push_back(d.anchor);
              } else {
                curve.points.push_back(geodesic_point(f.space(), u0, d.anchor, t / total));
              }
            }
          },
      },
      f.kind());

  attach_values(curve, f);
  return curve;
}

RefineResult refine_until(const Functional& f, double p, const Point& u0, SolverConfig cfg, double target_residual) {
  RefineResult result;
  for (int halvings = 0;; ++halvings) {
    if (cfg.horizon / cfg.tau > double(cfg.max_steps)) break;
    SampledCurve curve = solve_minimizing_movements(f, p, u0, cfg);
    result.blow_up = curve.meta.blow_up;
    result.residual = check_energy_identity(curve, f, p, target_residual).max_residual;
    result.curve = std::move(curve);
    result.tau = cfg.tau;
    result.halvings = halvings;
    if (result.blow_up) return result;
    if (result.residual < target_residual) {
      result.converged = true;
      return result;
    }
    if (cfg.tau / 2.0 < kTauFloor) break;
    cfg.tau /= 2.0;
  }
  return result;
}

}  // namespace maxslope
