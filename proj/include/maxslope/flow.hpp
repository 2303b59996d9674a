#pragma once

#include <cstddef>
#include <vector>

#include "maxslope/analysis.hpp"
#include "maxslope/curve.hpp"
#include "maxslope/functional.hpp"

namespace maxslope {

struct SolverConfig {
  double tau = 1e-3;
  double horizon = 1.0;
  std::size_t max_steps = 10'000'000;
  bool stop_on_critical = false;
  double blow_up_radius = 1e6;

  /// Throws DomainError for non-positive tau/horizon/radius or when
  /// horizon / tau exceeds max_steps.
  void validate() const;
  std::size_t steps() const;
};

/// Minimizing movements v_{k+1} = prox_{tau}(v_k) on t_k = k tau. Halts
/// early on blow-up (d(u0, v_k) > blow_up_radius) or, when requested, once
/// the slope drops below kCriticalSlope. Values and slopes are cached.
SampledCurve solve_minimizing_movements(const Functional& f, double p, const Point& u0, const SolverConfig& cfg);

struct OracleOptions {
  /// Launch angle for the non-unique flows of -|x|^2/2 from the origin in R^2.
  double theta = 0.0;
};

/// True when `oracle_flow` has a closed form for (f, p, u0).
bool has_oracle(const Functional& f, double p, const Point& u0);

/// Exact flow sampled on `grid` (which must start at 0 and increase):
///   quadratic, any p       radial solution of r' = -(c r)^(1/(p-1)) (extinction for p > 2)
///   negative_quadratic     u0 e^t for p = 2; from the origin: constant for p <= 2,
///                          (alpha t)^(1/alpha) along angle theta for p > 2
///   norm_like, any p       sign(u0) max(|u0| - t, 0)
///   distance_to_point      unit-speed geodesic to the anchor, then constant
/// Throws DomainError for an unregistered combination.
SampledCurve oracle_flow(const Functional& f, double p, const Point& u0, const std::vector<double>& grid,
                         const OracleOptions& opts = {});

struct RefineResult {
  SampledCurve curve;
  double residual = 0.0;
  double tau = 0.0;
  int halvings = 0;
  bool converged = false;
  bool blow_up = false;
};

/// Halves tau from cfg.tau until the energy-identity residual drops below
/// `target_residual` or tau reaches 1e-7.
RefineResult refine_until(const Functional& f, double p, const Point& u0, SolverConfig cfg, double target_residual);

}  // namespace maxslope
