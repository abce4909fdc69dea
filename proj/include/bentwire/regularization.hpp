#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bentwire/geometry.hpp"
#include "bentwire/mesh.hpp"
#include "bentwire/units.hpp"

namespace bentwire {

/// How the free constant of a regularized power-law primitive is fixed.
///
/// Classical: the genuine antiderivative of V_eps, continuous at s = 0.
/// Branchwise: -(hbar^2 K^2 / 8m) sgn(s) ln(|s| + eps) (alpha = 1/2) and its
/// analogue for other alpha. This differs from the classical primitive by a
/// step at s = 0 whose height grows like ln(1/eps), i.e. it is the primitive
/// of V_eps plus a point interaction at the origin.
enum class PrimitiveConvention { Classical, Branchwise };

/// Cells of the quasi-derivative mesh are integrated with an n-point Gauss
/// rule; a cell that contains a breakpoint in its interior is split there.
struct CellQuadratureRule {
  int gauss_order = 4;
  std::vector<double> breakpoints;
};

/// Geometric potential V = -(hbar^2 / 8m) kappa^2 sampled on a mesh, together
/// with its primitive U (U' = V away from the singular point).
struct PotentialModel {
  std::optional<Mesh> mesh;
  std::vector<double> v_samples;  // meV, at the staggered nodes of mesh
  std::function<double(double)> primitive;  // U(s), meV nm, includes constant_C
  CellQuadratureRule u_rule;
  double constant_C = 0.0;  // meV nm
  /// hbar^2 K^2 / 8m for power-law kinds (meV nm^(2 alpha)), 0 otherwise.
  double amplitude_prefactor = 0.0;
  bool bounded = true;

  double U(double s) const { return primitive(s); }
};

/// kappa_eps = K (|s| + eps)^(-alpha) with the base's K and alpha.
CurvatureSpec regularize(const CurvatureSpec& base, double epsilon);

/// V(s) = -(hbar^2 / 8m) kappa(s)^2 at a single point.
double geometric_potential_value(const CurvatureSpec& spec, const PhysicalParams& params, double s);

/// Samples V on the staggered nodes of the mesh. A squared-curvature bump is
/// cell-averaged rather than point-sampled so that narrow bumps keep their
/// integral on coarse meshes. Throws SingularPointError when a node hits the
/// singular point.
PotentialModel geometric_potential(const CurvatureSpec& spec, const PhysicalParams& params, const Mesh& mesh);

/// Primitive U of the geometric potential plus the constant C. Closed form for
/// zero, constant and power-law kinds; cumulative Gauss quadrature otherwise.
PotentialModel potential_primitive(const CurvatureSpec& spec, const PhysicalParams& params, double C,
                                   PrimitiveConvention convention = PrimitiveConvention::Classical);

/// Bump width as a function of epsilon: width = scale * eps^exponent (nm).
struct WidthRule {
  double scale = 1.0;
  double exponent = 1.0;
  double operator()(double eps) const;
};

struct BumpDefect {
  double integrated_height = 0.0;  // P, 1/nm
  double center = 0.0;
  WidthRule width;
};

struct RegularizationFamily {
  CurvatureSpec base;
  std::vector<double> epsilons;
  std::optional<BumpDefect> defect;

  std::size_t size() const { return epsilons.size(); }
  /// Curvature of the i-th member: regularize(base, eps_i) for power-law bases,
  /// the base itself otherwise, plus the defect bump when present.
  CurvatureSpec member(std::size_t index) const;
  void validate() const;
};

RegularizationFamily make_family(const CurvatureSpec& base, std::vector<double> epsilons);

/// Adds Delta_eps(s) = (P / w) bump((s - s0) / w) to every member's kappa^2
/// with w = width(eps). P = 0 leaves the family unchanged.
RegularizationFamily perturb_with_bump(const RegularizationFamily& family, double integrated_height,
                                       WidthRule width = {}, double center = 0.0);

/// ||kappa_eps - kappa||_{L1(J)} for member `index`.
double l1_curvature_error(const RegularizationFamily& family, std::size_t index, const PhysicalParams& params);

/// min_C ||U_eps - U - C||_{L2(J)} for member `index` (meV nm^(3/2)).
double l2_primitive_error(const RegularizationFamily& family, std::size_t index, const PhysicalParams& params,
                          PrimitiveConvention convention = PrimitiveConvention::Classical);

/// min_C ||S - C||_{L2(J)} for the step S = -(hbar^2/8m) P H(s - s0): the value
/// the L2 primitive error of a bumped admissible family tends to.
double step_primitive_norm(double integrated_height, double center, const PhysicalParams& params);

enum class Verdict { Admissible, PreAdmissibleOnly, Inconclusive };
std::string to_string(Verdict verdict);

struct AdmissibilityTolerances {
  double l1_relative = 1e-3;   // final L1 error < l1_relative * ||kappa||_1
  double l2_min_slope = 0.2;   // decades of L2 error per decade of eps
  double zero_floor = 1e-12;   // errors below this (relative) count as zero
};

struct AdmissibilityReport {
  std::vector<double> epsilons;
  std::vector<double> l1_curvature_errors;
  std::vector<double> l2_primitive_errors;
  /// Same errors with the branchwise primitive convention, for comparison.
  std::vector<double> l2_branchwise_errors;
  double l2_slope = 0.0;
  bool l1_converging = false;
  bool l2_converging = false;
  Verdict verdict = Verdict::Inconclusive;
};

AdmissibilityReport assess_admissibility(const RegularizationFamily& family, const PhysicalParams& params,
                                         const AdmissibilityTolerances& tolerances = {});

}  // namespace bentwire
