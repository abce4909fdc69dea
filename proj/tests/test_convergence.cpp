#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bentwire/convergence.hpp"

using namespace bentwire;
using std::numbers::pi;

namespace {

const PhysicalParams kParams{};

std::vector<double> geometric(int count) {
  std::vector<double> out;
  for (int j = 0; j < count; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

// Lowest eigenvalues with a rectangular barrier of height H on |s| < 1.
std::vector<double> double_well(double H, int cells) {
  const auto mesh = Mesh::uniform(-5, 5, cells);
  PotentialModel m;
  m.mesh = mesh;
  for (int j = 0; j < cells; ++j) m.v_samples.push_back(std::abs(mesh.midpoint(j)) < 1.0 ? H : 0.0);
  return eigen_lowest(assemble_regular(m, kParams, mesh, canonical_bc(BcPreset::Dirichlet)), 4).eigenvalues;
}

Spectrum free_box(int cells, int k) {
  const auto mesh = Mesh::uniform(-5, 5, cells);
  return eigen_lowest(assemble_regular(geometric_potential(CurvatureSpec::zero(), kParams, mesh), kParams, mesh,
                                       canonical_bc(BcPreset::Dirichlet)),
                      k);
}

}  // namespace

TEST_CASE("extrapolation recovers a power-law limit") {
  const auto eps = geometric(12);
  std::vector<double> v;
  for (double e : eps) v.push_back(1.0 + std::sqrt(e));
  const auto r = extrapolate_track(eps, v);
  CHECK_FALSE(r.flagged);
  CHECK(r.limit == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.rate == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.uncertainty < 1e-9);
}

TEST_CASE("extrapolation of a constant track") {
  const auto eps = geometric(6);
  const auto r = extrapolate_track(eps, std::vector<double>(6, 3.25));
  CHECK(r.limit == 3.25);
  CHECK(r.uncertainty == 0.0);
  CHECK_FALSE(r.flagged);
}

TEST_CASE("non-monotone tail is flagged") {
  const auto eps = geometric(6);
  const auto r = extrapolate_track(eps, {1.0, 0.5, 0.3, 0.2, 0.25, 0.22});
  CHECK(r.flagged);
  CHECK(r.limit == 0.22);
  CHECK(r.uncertainty == doctest::Approx(0.03));
  CHECK_THROWS(extrapolate_track(eps, {1.0}));
}

TEST_CASE("pairing of well separated columns is the identity") {
  const std::vector<std::vector<double>> cols{{1, 5, 9}, {1.1, 5.1, 9.1}, {1.2, 5.2, 9.2}, {}, {1.25, 5.25, 9.25}};
  const auto tracks = pair_tracks(cols);
  REQUIRE(tracks.size() == 3);
  for (int t = 0; t < 3; ++t) {
    CHECK(tracks[t].n == t);
    CHECK(tracks[t].indices == std::vector<int>{t, t, t, -1, t});
    CHECK_FALSE(tracks[t].ambiguous);
    CHECK(tracks[t].members == std::vector<int>{t});
  }
  CHECK(std::isnan(tracks[0].values[3]));
}

TEST_CASE("a growing barrier merges the lowest pair into one limit state") {
  std::vector<std::vector<double>> cols;
  for (double H : {50.0, 200.0, 1000.0, 5000.0}) cols.push_back(double_well(H, 2000));
  const auto tracks = pair_tracks(cols);
  REQUIRE(tracks.size() == 4);
  CHECK(tracks[0].n == 0);
  CHECK(tracks[1].n == 0);
  CHECK(tracks[0].members == std::vector<int>{0, 1});
  CHECK(tracks[2].n == 1);
  CHECK(tracks[3].n == 1);
}

TEST_CASE("eigenspace overlap") {
  const auto box = free_box(400, 3);
  CHECK(eigenspace_overlap(box, {0}, box, {0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eigenspace_overlap(box, {0}, box, {1}) < 1e-16);
  CHECK(eigenspace_overlap(box, {0, 1}, box, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(eigenspace_overlap(box, {0}, free_box(500, 3), {0}));

  // Endpoint-node eigenfunctions resampled onto staggered nodes.
  const auto mesh = Mesh::uniform(-5, 5, 400);
  const auto quasi = eigen_lowest(assemble_quasi(potential_primitive(CurvatureSpec::zero(), kParams, 0.0), kParams,
                                                 mesh, canonical_bc(BcPreset::Dirichlet)),
                                  3);
  CHECK(eigenspace_overlap(box, {0}, quasi, {0}) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("convergence constant fit") {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8};
  const auto fit = fit_convergence_constant({0.2, 0.4, 0.8, 1.6}, x);
  CHECK(fit.constant == doctest::Approx(2.0));
  CHECK(fit.relative_residual < 1e-12);
  CHECK_THROWS(fit_convergence_constant({1, 2}, {0.5, 0.5}));
  CHECK_THROWS(fit_convergence_constant({1, 2}, {0.5}));
}

TEST_CASE("sweep of a bounded base gives constant tracks") {
  SweepProblem p;
  p.base = CurvatureSpec::constant(0.2);
  p.n_cells = 400;
  p.k_states = 3;
  const auto result = sweep(p, geometric(5));
  REQUIRE(result.tracks.size() == 3);
  for (const auto& track : result.tracks) {
    for (double v : track.values) CHECK(v == track.values.front());
    CHECK(track.extrapolation.limit == track.values.front());
    CHECK_FALSE(track.extrapolation.flagged);
  }
  CHECK_THROWS(sweep(p, geometric(3)));
}

TEST_CASE("sweep records per-epsilon failures without throwing") {
  SweepProblem p;
  p.base = CurvatureSpec::tabulated({{-1.0, 0.1}, {1.0, 0.1}});  // does not cover J
  p.n_cells = 100;
  SweepResult result;
  CHECK_NOTHROW(result = sweep(p, geometric(4)));
  for (const auto& point : result.points) {
    CHECK_FALSE(point.spectrum.has_value());
    CHECK_FALSE(point.error.empty());
  }
  CHECK(result.tracks.empty());
}

TEST_CASE("sweep overlaps against a reference spectrum") {
  SweepProblem p;
  p.base = CurvatureSpec::power_law(power_law_amplitude(0.5, pi / 8, -5, 5), 0.5);
  p.n_cells = 1000;
  p.k_states = 2;
  const auto reference = solve_quasi(p, p.n_cells);
  const auto result = sweep(p, geometric(6), &reference);
  REQUIRE(result.overlaps.size() == 6);
  for (double o : result.overlaps) {
    CHECK(o > 0.9);
    CHECK(o <= 1.0 + 1e-12);
  }
}

TEST_CASE("angle scan isolates failures and reduces to the box at theta = pi") {
  SweepProblem p;
  p.n_cells = 800;
  const auto scan = angle_scan(p, 0.5, {pi, 4.0}, geometric(5));
  REQUIRE(scan.size() == 2);
  CHECK(scan[0].ok);
  const double h = 10.0 / 800;
  const double box = 4 * kParams.kinetic_prefactor() / (h * h) * std::pow(std::sin(pi * h / 20.0), 2);
  CHECK(scan[0].ground_energy == doctest::Approx(box).epsilon(1e-10));
  CHECK_FALSE(scan[1].ok);
  CHECK_FALSE(scan[1].error.empty());
}

TEST_CASE("default epsilons") {
  const auto eps = default_epsilons();
  CHECK(eps.size() == 15);
  CHECK(eps.front() == 1.0);
  CHECK(eps.back() == std::ldexp(1.0, -14));
}
