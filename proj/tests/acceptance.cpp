// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bentwire/config.hpp"
#include "bentwire/convergence.hpp"
#include "bentwire/validate.hpp"

using namespace bentwire;
using std::numbers::pi;

namespace {

int failures = 0;

void verdict(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& text) {
  std::printf("  info: %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const EigenTrack* track_for(const SweepResult& r, int n) {
  for (const auto& t : r.tracks)
    if (t.n == n) return &t;
  return nullptr;
}

std::vector<double> smooth_levels(int cells, int k) {
  const PhysicalParams params;
  const auto mesh = Mesh::uniform(params.a, params.b, cells);
  PotentialModel m;
  m.mesh = mesh;
  for (int j = 0; j < cells; ++j) m.v_samples.push_back(20.0 * std::cos(mesh.midpoint(j)));
  return eigen_lowest(assemble_regular(m, params, mesh, canonical_bc(BcPreset::Dirichlet)), k).eigenvalues;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const RunConfig config;  // defaults reproduce the bent-wire example
  const SweepProblem problem = config.problem();
  const PhysicalParams params = problem.params;
  const auto eps = config.sweep_epsilons();

  // C1 / C2: default sweep and extrapolated spectrum.
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult result = sweep(problem, eps);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const EigenTrack* ground = track_for(result, 0);
  {
    const double e0 = ground ? ground->extrapolation.limit : NAN;
    const double u0 = ground ? ground->extrapolation.uncertainty : NAN;
    const bool ok = ground && std::abs(e0 - (-4.59)) <= 0.10 && seconds < 120.0 && eps.back() <= 1e-4 &&
                    problem.n_cells >= 8000;
    verdict("C1", ok,
            fmt("extrapolated E0 = %.6f meV (+/- %.3g), target -4.59 +/- 0.10; N = %d, eps_min = %.3g nm, %.1f s", e0,
                u0, problem.n_cells, eps.back(), seconds));
    if (ground)
      info(fmt("ground track at eps = 1, 2^-7, 2^-14: %.6f, %.6f, %.6f meV", ground->values.front(), ground->values[7],
               ground->values.back()));
  }
  {
    int negatives = 0;
    bool ground_negative = false;
    std::string listing;
    for (int n = 0; n < 4; ++n) {
      const auto* t = track_for(result, n);
      const double v = t ? t->extrapolation.limit : NAN;
      listing += fmt("%s%.6f", n ? ", " : "", v);
      if (v < 0) ++negatives;
      if (n == 0) ground_negative = v < 0;
    }
    verdict("C2", negatives == 1 && ground_negative, "extrapolated levels [" + listing + "] meV");
  }

  // C3: angle scan.
  {
    const auto thetas = config.scan_thetas();
    const auto scan = angle_scan(problem, config.alpha, thetas, eps);
    bool increasing = true, sign_change = false, all_ok = true;
    std::string listing;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      all_ok = all_ok && scan[i].ok;
      listing += fmt("%s%.4f", i ? ", " : "", scan[i].ground_energy);
      if (i > 0) {
        increasing = increasing && scan[i].ground_energy > scan[i - 1].ground_energy;
        sign_change = sign_change || (scan[i - 1].ground_energy < 0) != (scan[i].ground_energy < 0);
      }
    }
    // theta = pi: straight wire, box oracle with a Richardson bound on the mesh error.
    auto box_problem = problem;
    const auto fine = angle_scan(box_problem, config.alpha, {pi}, eps).front();
    box_problem.n_cells = problem.n_cells / 2;
    const auto coarse = angle_scan(box_problem, config.alpha, {pi}, eps).front();
    const double exact = hbar2_over_2me * pi * pi / (params.length() * params.length());
    const double mesh_error = std::abs(fine.ground_energy - coarse.ground_energy) / 3.0;
    const bool box_ok = fine.ok && std::abs(fine.ground_energy - exact) <= 2.0 * mesh_error;
    verdict("C3", all_ok && increasing && sign_change && box_ok,
            fmt("E0(theta = k pi/16) = [%s]; increasing %d, sign change %d; E0(pi) = %.9f vs %.9f, |diff| %.2e <= "
                "2 O(h^2) = %.2e",
                listing.c_str(), increasing, sign_change, fine.ground_energy, exact,
                std::abs(fine.ground_energy - exact), 2.0 * mesh_error));
  }

  // C4: quasi-derivative direct solve against the extrapolated limit.
  {
    const auto checks = cross_validate(problem, result, 4);
    bool all = true;
    std::string listing;
    for (const auto& c : checks) {
      all = all && c.agrees;
      listing += fmt("%sn=%d direct %.5f vs extrap %.5f (|d| %.3g, tol %.3g)", c.n ? "; " : "", c.n, c.direct,
                     c.extrapolated, std::abs(c.direct - c.extrapolated), c.tolerance);
    }
    verdict("C4", all, listing);
  }

  // C5: analytic oracle suite.
  {
    const auto checks = run_oracle_suite(16000);
    bool all = !checks.empty();
    std::string failed;
    for (const auto& c : checks) {
      all = all && c.passed;
      if (!c.passed) failed += " " + c.name;
    }
    verdict("C5", all, fmt("%zu oracle checks%s", checks.size(), all ? ", all within tolerance" : failed.c_str()));
  }

  // C6: admissibility positive and negative case.
  {
    const auto family = problem.family(config.admissibility_eps());
    const auto positive = assess_admissibility(family, params);
    const auto decreasing = [](const std::vector<double>& v) {
      for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
      return true;
    };
    const bool pos_ok = positive.verdict == Verdict::Admissible && decreasing(positive.l1_curvature_errors) &&
                        decreasing(positive.l2_primitive_errors);

    const double P = 0.5, s0 = 1.0;
    const WidthRule width{1.0, 1.0};
    const auto bumped = perturb_with_bump(family, P, width, s0);
    const auto negative = assess_admissibility(bumped, params);
    const double step = step_primitive_norm(P, s0, params);
    const double plateau = negative.l2_primitive_errors.back();
    const bool neg_ok = negative.verdict == Verdict::PreAdmissibleOnly && std::abs(plateau - step) <= 0.05 * step;

    auto bump_problem = problem;
    bump_problem.defect = BumpDefect{P, s0, width};
    const auto bumped_sweep = sweep(bump_problem, eps);
    const auto* bg = track_for(bumped_sweep, 0);
    const double diff = bg && ground ? std::abs(bg->extrapolation.limit - ground->extrapolation.limit) : NAN;
    const double combined = bg && ground ? bg->extrapolation.uncertainty + ground->extrapolation.uncertainty : NAN;
    const bool shift_ok = diff > combined;

    verdict("C6", pos_ok && neg_ok && shift_ok,
            fmt("base verdict %s (L2 %.3g -> %.3g, slope %.3f); bumped verdict %s, L2 plateau %.4f vs step norm %.4f "
                "(%.1f%%); bumped E0 %.5f vs %.5f, |diff| %.4f > %.4f: %d",
                to_string(positive.verdict).c_str(), positive.l2_primitive_errors.front(),
                positive.l2_primitive_errors.back(), positive.l2_slope, to_string(negative.verdict).c_str(), plateau,
                step, 100.0 * std::abs(plateau - step) / step, bg ? bg->extrapolation.limit : NAN,
                ground ? ground->extrapolation.limit : NAN, diff, combined, shift_ok));
    info(fmt("branchwise-primitive L2 errors on the base family: %.3g -> %.3g", positive.l2_branchwise_errors.front(),
             positive.l2_branchwise_errors.back()));
  }

  // C7: Gronwall trace bound.
  {
    const auto grid = staggered_grid(params.a, params.b, problem.n_cells);
    const Pose pose{};
    const auto limit = reconstruct_trace(problem.base, params, grid, pose);
    const auto family = problem.family(eps);
    bool all = true;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const auto member = family.member(i);
      const double dist = trace_distance(reconstruct_trace(member, params, grid, pose), limit);
      const auto g = gronwall_constants(member, params);
      const double bound = g.M * g.M_eps.value_or(g.M) * params.length() * l1_curvature_error(family, i, params);
      all = all && dist < bound;
      worst_ratio = std::max(worst_ratio, dist / bound);
    }
    verdict("C7", all, fmt("max trace_distance / bound over %zu eps = %.3g", eps.size(), worst_ratio));
  }

  // C8: eigenvalue deviation against the primitive error on the ground track.
  {
    const auto family = problem.family(eps);
    std::vector<double> dev, classical, branchwise;
    for (std::size_t i = eps.size() - 5; i < eps.size(); ++i) {
      dev.push_back(std::abs(ground->values[i] - ground->extrapolation.limit));
      classical.push_back(l2_primitive_error(family, i, params, PrimitiveConvention::Classical));
      branchwise.push_back(l2_primitive_error(family, i, params, PrimitiveConvention::Branchwise));
    }
    const auto fit = fit_convergence_constant(dev, classical);
    verdict("C8", fit.relative_residual < 0.2,
            fmt("C_hat = %.4g, relative residual %.3f over the last 5 eps (threshold 0.20)", fit.constant,
                fit.relative_residual));
    const auto alt = fit_convergence_constant(dev, branchwise);
    info(fmt("branchwise-primitive fit: C_hat = %.4g, relative residual %.3f", alt.constant, alt.relative_residual));
  }

  // C9: ground-state density peak at the origin.
  {
    bool at_origin = true, peak_up = true, curv_up = true;
    double prev_peak = -1.0, prev_curv = -1.0, last_growth = 0.0;
    int used = 0;
    for (const auto& p : result.points) {
      if (p.epsilon > 0.1 || !p.spectrum) continue;
      const auto& psi = p.spectrum->eigenfunctions[ground->indices[&p - result.points.data()]];
      const auto& nodes = p.spectrum->nodes;
      const double h = p.spectrum->mesh.h;
      std::size_t arg = 0;
      for (std::size_t j = 1; j < psi.size(); ++j)
        if (psi[j] * psi[j] > psi[arg] * psi[arg]) arg = j;
      // Staggered nodes sit symmetrically at +-h/2; either is nearest to s = 0.
      at_origin = at_origin && std::abs(nodes[arg]) <= 0.5 * h * (1 + 1e-9);
      const double peak = psi[arg] * psi[arg];
      const double curv = std::abs(psi[arg + 1] * psi[arg + 1] - 2 * peak + psi[arg - 1] * psi[arg - 1]) / (h * h);
      if (used > 0) {
        peak_up = peak_up && peak > prev_peak;
        curv_up = curv_up && curv > prev_curv;
        last_growth = curv / prev_curv;
      }
      prev_peak = peak;
      prev_curv = curv;
      ++used;
    }
    const bool no_saturation = last_growth > 1.01;
    verdict("C9", used >= 2 && at_origin && peak_up && curv_up && no_saturation,
            fmt("%d eps <= 0.1: peak at origin %d, peak increasing %d, |second difference| increasing %d, last "
                "growth factor %.4f (> 1.01 required), final peak %.4f",
                used, at_origin, peak_up, curv_up, last_growth, prev_peak));
  }

  // C10: property suites.
  {
    double worst_orth = 0.0;
    for (const auto& p : result.points)
      if (p.spectrum)
        for (std::size_t i = 0; i < p.spectrum->size(); ++i)
          for (std::size_t j = 0; j < p.spectrum->size(); ++j)
            worst_orth = std::max(worst_orth, std::abs(p.spectrum->inner(i, j) - (i == j ? 1.0 : 0.0)));

    const auto& last = result.points.back();
    const auto family = problem.family(eps);
    const Mesh mesh = problem.mesh();
    const auto T = assemble_regular(geometric_potential(family.member(eps.size() - 1), params, mesh), params, mesh,
                                    problem.bc);
    const auto& lam = last.spectrum->eigenvalues;
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> shift(T.gershgorin().first, lam.back());
    int sturm_ok = 0;
    for (int t = 0; t < 100; ++t) {
      const double sigma = shift(rng);
      const int expect = static_cast<int>(std::count_if(lam.begin(), lam.end(), [&](double l) { return l < sigma; }));
      sturm_ok += sturm_count(T, sigma) == expect;
    }

    const auto l1 = smooth_levels(1000, 4), l2 = smooth_levels(2000, 4), l4 = smooth_levels(4000, 4);
    double worst_ratio_dev = 0.0;
    for (int n = 0; n < 4; ++n) {
      const double ratio = (l1[n] - l2[n]) / (l2[n] - l4[n]);
      worst_ratio_dev = std::max(worst_ratio_dev, std::abs(ratio - 4.0) / 4.0);
    }

    bool identical = true;
    const std::string cli = BENTWIRE_CLI_PATH;
    const auto work = std::filesystem::temp_directory_path() / "bentwire_acceptance";
    std::filesystem::remove_all(work);
    for (const char* cmd : {"spectrum", "sweep", "trace"}) {
      for (int run = 0; run < 2; ++run) {
        const auto out = work / (std::string(cmd) + std::to_string(run));
        const std::string line = cli + " " + cmd + " --ncells 4000 --out " + out.string() + " > /dev/null 2>&1";
        if (std::system(line.c_str()) != 0) identical = false;
      }
      const auto a = work / (std::string(cmd) + "0"), b = work / (std::string(cmd) + "1");
      if (!std::filesystem::exists(a)) identical = false;
      else
        for (const auto& entry : std::filesystem::directory_iterator(a)) {
          // The resolved configuration records its own output directory.
          if (entry.path().filename() == "resolved_config.json") continue;
          const auto other = b / entry.path().filename();
          if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other)) identical = false;
        }
    }
    std::filesystem::remove_all(work);

    const bool ok = worst_orth < 1e-8 && sturm_ok == 100 && worst_ratio_dev <= 0.2 && identical;
    verdict("C10", ok,
            fmt("orthonormality defect %.2e (< 1e-8); Sturm consistency %d/100; Richardson ratio deviation %.1f%% "
                "(<= 20%%); CLI outputs byte-identical %d",
                worst_orth, sturm_ok, 100.0 * worst_ratio_dev, identical));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
