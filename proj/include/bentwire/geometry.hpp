#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bentwire/units.hpp"

namespace bentwire {

enum class CurvatureKind { Zero, Constant, PowerLawSingular, PowerLawRegularized, Tabulated };

std::string to_string(CurvatureKind kind);

/// Thrown when a singular curvature (or anything derived from it) is evaluated
/// at its singular point.
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Additive correction to the squared curvature,
///   Delta(s) = (P / w) * bump((s - s0) / w),
/// with bump(x) = (1 + cos(pi x)) / 2 on |x| <= 1 (unit integral, C^1).
struct SquaredCurvatureBump {
  double integrated_height = 0.0;  // P, 1/nm
  double center = 0.0;             // s0, nm
  double width = 1.0;              // w, nm

  double operator()(double s) const;
  /// Integral of Delta from -infinity to s; a smooth step from 0 to P.
  double cumulative(double s) const;
  double lo() const { return center - width; }
  double hi() const { return center + width; }
};

/// Symbolic curvature function kappa(s) of an arc-length parametrized plane
/// curve. Power-law kinds carry amplitude K and exponent alpha in (0, 3/4);
/// the regularized kind replaces |s| by |s| + epsilon.
class CurvatureSpec {
 public:
  static CurvatureSpec zero();
  static CurvatureSpec constant(double value);
  static CurvatureSpec power_law(double amplitude, double alpha);
  static CurvatureSpec power_law_regularized(double amplitude, double alpha, double epsilon);
  /// Samples (s, kappa) with strictly increasing s; linear interpolation, no
  /// extrapolation.
  static CurvatureSpec tabulated(std::vector<std::pair<double, double>> samples);

  /// Copy of this spec with an additive squared-curvature correction.
  CurvatureSpec with_bump(const SquaredCurvatureBump& bump) const;
  /// Copy of this spec without any squared-curvature correction.
  CurvatureSpec without_bump() const;

  CurvatureKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double alpha() const { return alpha_; }
  double epsilon() const { return epsilon_; }
  double constant_value() const { return constant_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }
  const std::optional<SquaredCurvatureBump>& bump() const { return bump_; }

  bool is_power_law() const {
    return kind_ == CurvatureKind::PowerLawSingular || kind_ == CurvatureKind::PowerLawRegularized;
  }
  /// True only for an unbounded (K > 0) PowerLawSingular spec.
  bool is_singular() const { return kind_ == CurvatureKind::PowerLawSingular && amplitude_ > 0.0; }

  /// kappa(s). Throws SingularPointError at s = 0 for PowerLawSingular and
  /// std::out_of_range outside the tabulated range.
  double operator()(double s) const;
  /// kappa(s)^2 including the bump correction (if any).
  double squared(double s) const;

  /// Closed-form antiderivative of kappa, odd about s = 0 for the power-law
  /// kinds; empty when a bump is attached (no closed form).
  std::optional<double> antiderivative(double s) const;

  /// Points where kappa is singular or non-smooth; used as quadrature cuts.
  std::vector<double> breakpoints() const;

  /// The unregularized power law this spec approximates; the spec itself for
  /// non-power-law kinds (bump dropped in both cases).
  CurvatureSpec singular_limit() const;

 private:
  CurvatureKind kind_ = CurvatureKind::Zero;
  double amplitude_ = 0.0;
  double alpha_ = 0.0;
  double epsilon_ = 0.0;
  double constant_ = 0.0;
  std::vector<std::pair<double, double>> samples_;
  std::optional<SquaredCurvatureBump> bump_;
};

/// K = (1 - alpha)(pi - theta) / (|a|^(1-alpha) + |b|^(1-alpha)), so that the
/// power-law curve on (a, b) has total turn pi - theta.
double power_law_amplitude(double alpha, double theta, double a, double b);

double eval_curvature(const CurvatureSpec& spec, double s);

/// Integral of kappa over [lo, hi]; closed form when available.
double turning_angle(const CurvatureSpec& spec, double lo, double hi);

/// Total integral curvature over J.
double total_turn(const CurvatureSpec& spec, const PhysicalParams& params);

/// ||kappa||_{L1(J)}.
double curvature_l1_norm(const CurvatureSpec& spec, const PhysicalParams& params);

/// ||kappa_1 - kappa_2||_{L1(J)}.
double curvature_l1_distance(const CurvatureSpec& lhs, const CurvatureSpec& rhs,
                             const PhysicalParams& params);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Position and tangent angle of the curve at s = a.
struct Pose {
  Point2 origin;
  double angle = 0.0;
};

struct CurveTrace {
  std::vector<double> s_grid;
  std::vector<Point2> positions;
  std::vector<double> angles;
};

/// Pose at the origin with the tangent angle chosen so that the end tangents
/// of the curve are mirror images of each other.
Pose symmetric_pose(const CurvatureSpec& spec, const PhysicalParams& params);

/// Midpoint-staggered grid s_j = a + (j + 1/2) h, h = (b - a) / n.
std::vector<double> staggered_grid(double a, double b, int n);
/// Endpoint-inclusive grid s_j = a + j h, j = 0..n-1, h = (b - a) / (n - 1).
std::vector<double> endpoint_grid(double a, double b, int n);

/// Reconstructs the curve on the given arc-length grid from its curvature via
/// gamma(s) = gamma0 + int_a^s kappa and X(s) = X(a) + int_a^s (cos gamma, sin gamma).
/// The grid must be strictly increasing inside [a, b] and, for singular specs,
/// must not contain s = 0.
CurveTrace reconstruct_trace(const CurvatureSpec& spec, const PhysicalParams& params,
                             std::span<const double> s_grid, const Pose& initial_pose);

/// Convenience overload: staggered grid for singular specs, endpoint-inclusive
/// otherwise.
CurveTrace reconstruct_trace(const CurvatureSpec& spec, const PhysicalParams& params, int n_points,
                             const Pose& initial_pose);

struct GronwallBound {
  double M = 0.0;
  std::optional<double> M_eps;
  double kappa_l1 = 0.0;
};

/// M = sqrt(2) (1 + ||kappa||_1 exp(||kappa||_1)) for the singular limit of
/// the spec; M_eps is the same expression for the spec itself when it is a
/// regularization of a power law.
GronwallBound gronwall_constants(const CurvatureSpec& spec, const PhysicalParams& params);

/// Maximum Euclidean distance between positions on a shared grid.
double trace_distance(const CurveTrace& lhs, const CurveTrace& rhs);

}  // namespace bentwire
