#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bentwire/geometry.hpp"
#include "bentwire/regularization.hpp"
#include "bentwire/spectral.hpp"
#include "bentwire/units.hpp"

namespace bentwire {

/// One regularized eigenvalue problem per epsilon, all on a shared mesh.
struct SweepProblem {
  CurvatureSpec base;  // singular power law, or a bounded spec (no epsilon dependence)
  PhysicalParams params;
  BoundaryConditions bc = canonical_bc(BcPreset::Dirichlet);
  int n_cells = 16000;
  int k_states = 4;
  std::optional<BumpDefect> defect;

  RegularizationFamily family(const std::vector<double>& epsilons) const;
  Mesh mesh() const { return Mesh::uniform(params.a, params.b, n_cells); }
};

/// Regularized spectrum of one family member at epsilon.
Spectrum solve_regularized(const SweepProblem& problem, const CurvatureSpec& member, double epsilon);

/// Direct solve of the singular limit in the quasi-derivative formulation.
Spectrum solve_quasi(const SweepProblem& problem, int n_cells);

struct ExtrapolationResult {
  double limit = 0.0;
  double uncertainty = 0.0;
  double rate = 0.0;
  bool flagged = false;  // tail not monotone, or too few points
};

/// A continuation path of one regularized eigenvalue across the sweep.
struct EigenTrack {
  int n = 0;                       // limit-state index
  std::vector<int> members;        // regularized indices (at the last epsilon) sharing n
  std::vector<int> indices;        // regularized index per epsilon (-1 where the solve failed)
  std::vector<double> values;      // meV per epsilon (NaN where the solve failed)
  bool ambiguous = false;
  ExtrapolationResult extrapolation;
};

struct SweepPoint {
  double epsilon = 0.0;
  std::optional<Spectrum> spectrum;
  std::string error;
};

struct SweepResult {
  std::vector<double> epsilons;
  std::vector<SweepPoint> points;
  std::vector<EigenTrack> tracks;
  /// Ground-state overlap with a reference spectrum per epsilon (empty when no
  /// reference was supplied).
  std::vector<double> overlaps;
  std::optional<AdmissibilityReport> admissibility;
};

/// Solves every epsilon independently; a failure at one epsilon is recorded in
/// its SweepPoint and does not abort the sweep. Tracks are paired and
/// extrapolated before returning. With a reference spectrum the ground-state
/// overlap per epsilon is recorded as well.
SweepResult sweep(const SweepProblem& problem, const std::vector<double>& epsilons,
                  const Spectrum* reference = nullptr);

/// Degeneracy grouping tolerance 1e-6 (1 + |lambda|).
double degeneracy_tolerance(double lambda);

/// Nearest-continuation pairing of ascending eigenvalue columns (one per
/// epsilon, largest epsilon first; empty columns are skipped). Tracks whose
/// final values agree within degeneracy_tolerance share a limit index n, at
/// most two per group.
std::vector<EigenTrack> pair_tracks(const std::vector<std::vector<double>>& columns);

/// Fits v(eps) = v0 + c eps^p on the tail of the sequence: p from the log-log
/// slope of the increments, then v0 by least squares. The limit comes from
/// the last four points, the uncertainty is its distance to the three-point
/// fit. A non-monotone tail returns the last value with the last increment as
/// uncertainty and sets the flag.
ExtrapolationResult extrapolate_track(const std::vector<double>& epsilons, const std::vector<double>& values);

/// sum_{i in group, j in ref_group} |<psi_i, psi_j>|^2 / |ref_group|. Both
/// spectra must live on the same mesh; eigenfunctions on a different node rule
/// are linearly resampled onto the first spectrum's nodes.
double eigenspace_overlap(const Spectrum& spectrum, const std::vector<int>& group, const Spectrum& reference,
                          const std::vector<int>& ref_group);

struct ConvergenceFit {
  double constant = 0.0;           // C_hat
  double relative_residual = 0.0;  // ||y - C x|| / ||y||
};

/// Least-squares slope through the origin of deviations against primitive errors.
ConvergenceFit fit_convergence_constant(const std::vector<double>& deviations,
                                        const std::vector<double>& primitive_errors);

struct AngleScanPoint {
  double theta = 0.0;
  double ground_energy = 0.0;
  double uncertainty = 0.0;
  bool ok = false;
  std::string error;
};

/// Sweep and ground-track extrapolation per opening angle; failures are
/// isolated per angle.
std::vector<AngleScanPoint> angle_scan(const SweepProblem& problem_template, double alpha,
                                       const std::vector<double>& thetas, const std::vector<double>& epsilons);

struct CrossCheck {
  int n = 0;
  double direct = 0.0;        // quasi-derivative eigenvalue at n_cells
  double coarse = 0.0;        // same at n_cells / 2
  double richardson = 0.0;    // |direct - coarse| / 3
  double extrapolated = 0.0;  // epsilon-extrapolated limit
  double uncertainty = 0.0;
  double tolerance = 0.0;     // max(0.05, 3 richardson)
  bool agrees = false;
};

/// Compares the quasi-derivative direct solution against the extrapolated
/// track limits for the lowest k states.
std::vector<CrossCheck> cross_validate(const SweepProblem& problem, const SweepResult& result, int k);

/// Default epsilon sweep 1, 1/2, ..., 2^-14 nm.
std::vector<double> default_epsilons();

}  // namespace bentwire
