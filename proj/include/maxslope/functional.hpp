#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "maxslope/metric.hpp"

namespace maxslope {

enum class PsiFamily {
  kLinear,  ///< psi(t) = t
  kPower,   ///< psi(t) = t^(p0 - 1)
};

/// Declared (p0, lambda)-convexity of a functional along geodesics:
///   f(g_t) <= (1-t) f(g_0) + t f(g_1) - lambda t (1 - psi(t)) d^p0(g_0, g_1).
struct ConvexityProfile {
  double p0 = 2.0;
  double lambda = 0.0;
  PsiFamily psi_family = PsiFamily::kLinear;

  double lambda_minus() const { return lambda < 0.0 ? -lambda : 0.0; }
  double psi(double t) const;
};

/// f(x) = scale * |x - center|^2 / 2 on R^n.
struct Quadratic {
  double scale = 1.0;
  std::vector<double> center;
};

/// f(x) = -|x|^2 / 2 on R^n.
struct NegativeQuadratic {
  std::size_t dimension = 1;
};

/// f(x) = |x| on R.
struct NormLike {};

/// f(v) = d(v, anchor) on the tripod.
struct DistanceToPoint {
  TripodPoint anchor;
};

using FunctionalKind = std::variant<Quadratic, NegativeQuadratic, NormLike, DistanceToPoint>;

/// A built-in proper, continuous functional with its convexity profile.
class Functional {
 public:
  static Functional quadratic(double scale, std::vector<double> center);
  static Functional negative_quadratic(std::size_t dimension);
  static Functional norm_like();
  static Functional distance_to_point(TripodPoint anchor);

  const FunctionalKind& kind() const { return kind_; }
  const MetricSpace& space() const { return space_; }
  const ConvexityProfile& profile() const { return profile_; }

  /// "quadratic", "negative_quadratic", "norm_like" or "distance_to_point".
  std::string tag() const;

  /// Same functional with a different declared profile. Any (p0, lambda')
  /// with lambda' <= lambda is still a valid declaration.
  Functional with_profile(ConvexityProfile profile) const;

  /// inf f over the space, when finite and known.
  std::optional<double> infimum() const;
  /// The unique minimizer, when one exists.
  std::optional<Point> minimizer() const;
  /// Point used to centre candidate grids (center, anchor or origin).
  Point reference_point() const;

 private:
  Functional(FunctionalKind kind, MetricSpace space, ConvexityProfile profile)
      : kind_(std::move(kind)), space_(space), profile_(profile) {}

  FunctionalKind kind_;
  MetricSpace space_;
  ConvexityProfile profile_;
};

double evaluate(const Functional& f, const Point& v);

/// Closed-form local slope |d^- f|(v).
double slope_analytic(const Functional& f, const Point& v);

/// sup over candidates w != v of {(f(v) - f(w)) / d(v,w) - lambda^- d^(p0-1)(v,w)}^+.
double slope_global_formula(const Functional& f, const Point& v, std::span<const Point> candidates);

struct CandidateOptions {
  std::size_t grid_points = 2048;
  std::size_t near_points = 2048;
  std::uint64_t seed = 0;
};

/// Default candidate set: a uniform grid on the ball of radius
/// 8 max(1, d(v, reference)) around the reference point plus log-spaced
/// points close to v.
std::vector<Point> default_candidates(const Functional& f, const Point& v, const CandidateOptions& opts = {});

/// F_p(w; tau, v) = f(w) + d^p(w, v) / (p tau^(p-1)).
double proximal_objective(const Functional& f, double p, double tau, const Point& v, const Point& w);

/// Throws HypothesisError unless tau^(p-1) < 1 / lambda^- and the exponent
/// is admissible for the declared profile.
void require_well_posed(const Functional& f, double p, double tau);

/// A global minimizer of F_p(.; tau, v). Uses a closed form when one is
/// registered, otherwise `proximal_numeric`.
Point proximal(const Functional& f, double p, double tau, const Point& v);

/// Numeric minimizer of F_p: Barzilai-Borwein descent with Armijo
/// backtracking on R^n, golden-section search per branch on the tripod.
Point proximal_numeric(const Functional& f, double p, double tau, const Point& v);

/// f_t(v) = inf_w F_p(w; t, v).
double moreau_envelope(const Functional& f, double p, double t, const Point& v);

/// Conjugate exponent p / (p - 1).
double conjugate(double p);

}  // namespace maxslope
