#pragma once

#include <cstddef>
#include <vector>

#include "maxslope/curve.hpp"

namespace maxslope {

/// A nonnegative quantity that may be +inf. When `infinite` is set, `value`
/// still carries the finite part resolved on the grid.
struct Extent {
  double value = 0.0;
  bool infinite = false;
};

/// Strictly increasing piecewise-linear map t -> s through (knots_t, knots_s).
struct TimeMap {
  std::vector<double> knots_t;
  std::vector<double> knots_s;
  Extent total_S;     ///< sup of the image, S*
  Extent domain_end;  ///< sup of the domain, t*
  double alpha = 0.0;

  std::size_t size() const { return knots_t.size(); }
  bool empty() const { return knots_t.size() < 2; }

  /// s(t), clamped to the knot range.
  double forward(double t) const;
  /// t(s) by binary search on the monotone interpolant, clamped.
  double inverse(double s) const;

  /// Throws DomainError when the knots are not strictly increasing from 0
  /// or differ in length.
  void validate() const;
};

/// Swaps the roles of t and s. The exponent of the inverse map is
/// -alpha / (1 - alpha), i.e. the exponent of the reverse transformation.
TimeMap invert_time_map(const TimeMap& map);

struct TailOptions {
  /// Integrability margin on fitted power-law exponents.
  double margin = 0.1;
};

/// Builds s(t) = int_0^t speed^alpha by composite trapezoid quadrature on
/// `times`. When `horizon_finite` is true the last node is t* and the last
/// cell is treated as a possibly singular end; otherwise the map is
/// extended past the grid by a fitted power-law tail that decides whether
/// S* is finite. With a finite horizon and a negative exponent the end at t*
/// may be singular; its integrability is decided by a power-law fit over
/// t* - t in [L, 10 L], L = max(t*/1000, 10 (t* - t_{m-2})).
TimeMap integrate_speed_power(const std::vector<double>& times, const std::vector<double>& speeds, double alpha,
                              bool horizon_finite, const TailOptions& opts = {});

/// u o t(s) on the image knots s_i = s(t_i): node i of the result carries
/// the i-th sample of `curve`, so no interpolation is involved. Knots whose
/// image does not strictly increase are dropped.
SampledCurve compose_on_knots(const SampledCurve& curve, const TimeMap& map);

/// u o t(s) sampled on `samples` equally spaced s in [0, last knot].
SampledCurve resample_through(const SampledCurve& curve, const TimeMap& map, std::size_t samples);

}  // namespace maxslope
