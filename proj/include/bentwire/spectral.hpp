#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bentwire/mesh.hpp"
#include "bentwire/regularization.hpp"
#include "bentwire/units.hpp"

namespace bentwire {

using Complex = std::complex<double>;
using Matrix2c = std::array<std::array<Complex, 2>, 2>;

enum class BcPreset { Dirichlet, Neumann, Robin, General };
std::string to_string(BcPreset preset);

/// Boundary conditions A (psi(a), psi'(a))^T + B (psi(b), psi'(b))^T = 0.
struct BoundaryConditions {
  Matrix2c A{};
  Matrix2c B{};
  BcPreset preset = BcPreset::General;
  double rho_a = 0.0;
  double rho_b = 0.0;

  /// Short tag used in reports: "dirichlet", "neumann", "robin:<ra>,<rb>", "general".
  std::string tag() const;
};

/// Dirichlet and Neumann ignore the Robin coefficients. Robin rows are
/// rho_a psi(a) + psi'(a) = 0 and rho_b psi(b) + psi'(b) = 0.
BoundaryConditions canonical_bc(BcPreset preset, double rho_a = 0.0, double rho_b = 0.0);

/// Parses "dirichlet", "neumann" or "robin:<rho_a>,<rho_b>".
BoundaryConditions parse_bc(const std::string& text);

struct SelfAdjointReport {
  double residual = 0.0;  // ||A E A^* - B E B^*||_F on the normalized pair
  int rank = 0;           // rank of (A | B)
  bool self_adjoint = false;
};

SelfAdjointReport check_self_adjoint(const BoundaryConditions& bc);

/// One endpoint of a separated condition: Dirichlet (psi = 0) or
/// rho psi + psi' = 0 (Neumann when rho = 0).
struct EndCondition {
  bool dirichlet = true;
  double rho = 0.0;
};

struct SeparatedConditions {
  EndCondition left;
  EndCondition right;
};

/// Splits bc into one real condition per endpoint; empty for coupled or
/// complex conditions.
std::optional<SeparatedConditions> separate(const BoundaryConditions& bc);

enum class Formulation { Regular, QuasiDerivative };
std::string to_string(Formulation formulation);

/// Symmetric tridiagonal matrix in meV. potential_part holds the row sums
/// (diag_i + offdiag_{i-1} + offdiag_i) as assembled, so that the quadratic form
///   psi^T T psi = sum_i (-offdiag_i)(psi_{i+1} - psi_i)^2 + sum_i potential_part_i psi_i^2
/// can be evaluated without cancelling the large kinetic entries.
struct TridiagonalOperator {
  std::vector<double> diag;
  std::vector<double> offdiag;
  std::vector<double> potential_part;
  std::vector<double> nodes;  // positions of the unknowns, nm
  Mesh mesh;
  std::string bc_tag;
  std::optional<double> epsilon_tag;
  Formulation formulation = Formulation::Regular;

  std::size_t size() const { return diag.size(); }
  double h() const { return mesh.h; }
  double inf_norm() const;
  /// Gershgorin interval containing the spectrum.
  std::pair<double, double> gershgorin() const;
  std::vector<double> apply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;
};

class BoundaryConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Central differences on the staggered nodes of mesh: diag = 2c/h^2 + V_j,
/// offdiag = -c/h^2, boundary rows folded by ghost-node elimination.
TridiagonalOperator assemble_regular(const PotentialModel& potential, const PhysicalParams& params, const Mesh& mesh,
                                     const BoundaryConditions& bc);

/// Linear elements with lumped mass on the endpoint nodes of mesh (unknowns at
/// the interior nodes). Stiffness c int phi_i' phi_j' plus the coupling
/// -int U (phi_i' phi_j + phi_i phi_j'), U taken from primitive.U with its mean
/// over J removed and integrated cellwise with Gauss-Legendre, split at the
/// rule's breakpoints. Dirichlet only.
TridiagonalOperator assemble_quasi(const PotentialModel& primitive, const PhysicalParams& params, const Mesh& mesh,
                                   const BoundaryConditions& bc);

/// Number of eigenvalues of T strictly below sigma (negative LDL^T pivots of T - sigma I).
int sturm_count(const TridiagonalOperator& T, double sigma);

struct Spectrum {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenfunctions;  // h sum psi^2 = 1
  std::vector<double> residuals;
  std::vector<bool> converged;
  std::vector<double> nodes;
  Mesh mesh;
  std::string bc_tag;
  std::optional<double> epsilon_tag;
  Formulation formulation = Formulation::Regular;

  std::size_t size() const { return eigenvalues.size(); }
  bool all_converged() const;
  /// h-weighted discrete inner product of two eigenfunctions.
  double inner(std::size_t i, std::size_t j) const;
};

struct EigenOptions {
  double relative_tolerance = 1e-12;
  int max_inverse_iterations = 50;
  unsigned seed = 20240611u;
};

/// The k lowest eigenpairs: Sturm bisection, inverse iteration, Rayleigh-quotient
/// polish of the eigenvalue. Eigenvectors are normalized to h sum psi^2 = 1 and
/// sign-fixed so the first component above 1e-8 in magnitude is positive.
Spectrum eigen_lowest(const TridiagonalOperator& T, int k, const EigenOptions& opts = {});

/// Linear interpolation of eigenfunction n onto target nodes; outside the
/// spectrum's node range the function is taken to vanish at a and b (Dirichlet)
/// or held constant otherwise. Renormalized with spacing target_h.
std::vector<double> resample(const Spectrum& spectrum, std::size_t n, std::span<const double> target_nodes,
                             double target_h);

}  // namespace bentwire
