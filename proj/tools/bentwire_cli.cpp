// Command-line driver: trace | spectrum | sweep | anglescan | admissibility | validate.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bentwire/config.hpp"
#include "bentwire/convergence.hpp"
#include "bentwire/report.hpp"
#include "bentwire/validate.hpp"

namespace fs = std::filesystem;
using namespace bentwire;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitIo = 2;

struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& detail, int code)
      : std::runtime_error(detail), stage(std::move(stage)), code(code) {}
  std::string stage;
  int code;
};

int report_error(const std::string& stage, const std::string& detail, int code) {
  nlohmann::json j{{"stage", stage}, {"detail", detail}};
  std::cerr << j.dump() << '\n';
  return code;
}

bool wants(const RunConfig& c, const char* format) {
  return std::find(c.formats.begin(), c.formats.end(), format) != c.formats.end();
}

int cmd_trace(const RunConfig& c, const fs::path& out) {
  const SweepProblem problem = c.problem();
  const auto grid = staggered_grid(c.a, c.b, c.n_cells);
  for (double eps : c.trace_epsilons) {
    const CurvatureSpec spec = regularize(problem.base, eps);
    const auto trace = reconstruct_trace(spec, problem.params, grid, symmetric_pose(spec, problem.params));
    write_text(out / ("trace_eps_" + format_number(eps) + ".csv"), trace_csv(trace));
  }
  const auto limit = reconstruct_trace(problem.base, problem.params, grid, symmetric_pose(problem.base, problem.params));
  write_text(out / "trace_limit.csv", trace_csv(limit));
  return kExitOk;
}

int cmd_spectrum(const RunConfig& c, const fs::path& out) {
  const SweepProblem problem = c.problem();
  Spectrum spectrum;
  if (c.formulation == "quasi") {
    spectrum = solve_quasi(problem, c.n_cells);
  } else {
    const RegularizationFamily family = problem.family({c.epsilon});
    spectrum = solve_regularized(problem, family.member(0), c.epsilon);
  }
  if (wants(c, "csv")) {
    write_text(out / "eigenvalues.csv", eigenvalues_csv(spectrum));
    for (std::size_t n = 0; n < spectrum.size(); ++n) {
      write_text(out / ("state_" + std::to_string(n) + ".csv"), state_csv(spectrum, n));
      write_text(out / ("density_" + std::to_string(n) + ".csv"), density_csv(spectrum, n));
    }
    const auto grid = staggered_grid(c.a, c.b, c.n_cells);
    std::vector<std::string> names{"kappa_limit"};
    std::vector<std::vector<double>> columns(1);
    for (double s : grid) columns[0].push_back(problem.base(s));
    for (double eps : c.trace_epsilons) {
      const CurvatureSpec spec = regularize(problem.base, eps);
      names.push_back("kappa_eps_" + format_number(eps));
      columns.emplace_back();
      for (double s : grid) columns.back().push_back(spec(s));
    }
    write_text(out / "curvature.csv", curvature_csv(grid, names, columns));
  }
  if (wants(c, "json")) write_json(out / "spectrum.json", spectrum_json(spectrum));
  return spectrum.all_converged() ? kExitOk : kExitCheck;
}

int cmd_sweep(const RunConfig& c, const fs::path& out) {
  const SweepProblem problem = c.problem();
  const auto eps = c.sweep_epsilons();
  const bool dirichlet = problem.bc.preset == BcPreset::Dirichlet;
  std::optional<Spectrum> reference;
  if (dirichlet) reference = solve_quasi(problem, c.n_cells);
  SweepResult result = sweep(problem, eps, reference ? &*reference : nullptr);
  const RegularizationFamily family = problem.family(eps);
  result.admissibility = assess_admissibility(family, problem.params);

  nlohmann::json doc = sweep_json(result);
  const auto& l2 = result.admissibility->l2_primitive_errors;
  if (!result.tracks.empty()) {
    const auto& ground = result.tracks.front();
    const std::size_t tail = std::min<std::size_t>(5, eps.size());
    std::vector<double> dev, err;
    for (std::size_t i = eps.size() - tail; i < eps.size(); ++i) {
      dev.push_back(std::abs(ground.values[i] - ground.extrapolation.limit));
      err.push_back(l2[i]);
    }
    try {
      const ConvergenceFit fit = fit_convergence_constant(dev, err);
      doc["convergence_fit"] = {{"C_hat", json_number(fit.constant)},
                                {"relative_residual", json_number(fit.relative_residual)}};
    } catch (const std::invalid_argument& ex) {
      doc["convergence_fit"] = {{"error", ex.what()}};
    }
  }
  if (dirichlet) {
    nlohmann::json cv = nlohmann::json::array();
    for (const auto& x : cross_validate(problem, result, std::min(4, c.k_states)))
      cv.push_back({{"n", x.n},
                    {"direct", json_number(x.direct)},
                    {"coarse", json_number(x.coarse)},
                    {"richardson", json_number(x.richardson)},
                    {"extrapolated", json_number(x.extrapolated)},
                    {"uncertainty", json_number(x.uncertainty)},
                    {"tolerance", json_number(x.tolerance)},
                    {"agrees", x.agrees}});
    doc["cross_validation"] = cv;
  }
  if (wants(c, "json")) write_json(out / "sweep_report.json", doc);
  if (wants(c, "csv")) {
    std::string csv = "epsilon";
    for (const auto& t : result.tracks) csv += ",E" + std::to_string(t.n) + "_meV";
    csv += '\n';
    for (std::size_t i = 0; i < eps.size(); ++i) {
      csv += format_number(eps[i]);
      for (const auto& t : result.tracks) csv += ',' + format_number(t.values[i]);
      csv += '\n';
    }
    write_text(out / "sweep_tracks.csv", csv);
  }
  const bool failed = std::any_of(result.points.begin(), result.points.end(),
                                  [](const SweepPoint& p) { return !p.error.empty(); });
  return failed ? kExitCheck : kExitOk;
}

int cmd_anglescan(const RunConfig& c, const fs::path& out) {
  const auto points = angle_scan(c.problem(), c.alpha, c.scan_thetas(), c.sweep_epsilons());
  if (wants(c, "csv")) write_text(out / "anglescan.csv", anglescan_csv(points));
  if (wants(c, "json")) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : points)
      doc.push_back({{"theta", json_number(p.theta)},
                     {"E0_meV", json_number(p.ground_energy)},
                     {"uncertainty", json_number(p.uncertainty)},
                     {"ok", p.ok},
                     {"note", p.error}});
    write_json(out / "anglescan.json", doc);
  }
  const bool failed = std::any_of(points.begin(), points.end(), [](const AngleScanPoint& p) { return !p.ok; });
  return failed ? kExitCheck : kExitOk;
}

int cmd_admissibility(const RunConfig& c, const fs::path& out) {
  const SweepProblem problem = c.problem();
  RegularizationFamily family = make_family(problem.base, c.admissibility_eps());
  if (problem.defect)
    family = perturb_with_bump(family, problem.defect->integrated_height, problem.defect->width,
                               problem.defect->center);
  const AdmissibilityReport report = assess_admissibility(family, problem.params);
  nlohmann::json doc = admissibility_json(report);
  if (problem.defect)
    doc["step_norm"] = json_number(step_primitive_norm(problem.defect->integrated_height, problem.defect->center,
                                                       problem.params));
  write_json(out / "admissibility.json", doc);
  return kExitOk;
}

int cmd_validate(const RunConfig& c, const fs::path& out) {
  const auto checks = run_oracle_suite(c.n_cells);
  bool all = true;
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& k : checks) {
    all = all && k.passed;
    std::printf("%s %s value=%s expected=%s tol=%s\n", k.passed ? "PASS" : "FAIL", k.name.c_str(),
                format_number(k.value).c_str(), format_number(k.expected).c_str(),
                format_number(k.tolerance).c_str());
    doc.push_back({{"name", k.name},
                   {"value", json_number(k.value)},
                   {"expected", json_number(k.expected)},
                   {"tolerance", json_number(k.tolerance)},
                   {"passed", k.passed}});
  }
  write_json(out / "validate_report.json", doc);
  return all ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound states of a particle on a plane curve with singular curvature"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, out_dir, formulation, bc;
  std::optional<double> epsilon, theta;
  std::optional<int> ncells, kstates;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--epsilon", epsilon, "regularization parameter for single-epsilon runs (nm)");
  app.add_option("--theta", theta, "opening angle (rad)");
  app.add_option("--ncells", ncells, "number of mesh cells");
  app.add_option("--kstates", kstates, "number of eigenstates");
  app.add_option("--formulation", formulation, "regular | quasi");
  app.add_option("--bc", bc, "dirichlet | neumann | robin:<rho_a>,<rho_b>");

  struct Command {
    std::string name;
    int (*run)(const RunConfig&, const fs::path&);
    std::string help;
  };
  const std::vector<Command> commands{
      {"trace", cmd_trace, "curve reconstruction for the trace epsilons and the singular limit"},
      {"spectrum", cmd_spectrum, "lowest eigenpairs at one epsilon, or the quasi-derivative direct solve"},
      {"sweep", cmd_sweep, "epsilon sweep with extrapolated tracks and cross-validation"},
      {"anglescan", cmd_anglescan, "extrapolated ground energy against the opening angle"},
      {"admissibility", cmd_admissibility, "L1 curvature and L2 primitive errors of the family"},
      {"validate", cmd_validate, "analytic oracle checks"}};
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("arguments", e.what(), kExitCheck);
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
  } catch (const ConfigError& e) {
    return report_error("config", e.what(), kExitCheck);
  } catch (const std::exception& e) {
    return report_error("config", e.what(), kExitIo);
  }
  if (!out_dir.empty()) config.directory = out_dir;
  if (epsilon) config.epsilon = *epsilon;
  if (theta) config.theta = *theta;
  if (ncells) config.n_cells = *ncells;
  if (kstates) config.k_states = *kstates;
  if (!formulation.empty()) config.formulation = formulation;
  if (!bc.empty()) config.bc = bc;

  try {
    config.validate();
  } catch (const std::exception& e) {
    return report_error("config", e.what(), kExitCheck);
  }

  const fs::path out = config.directory;
  try {
    fs::create_directories(out);
    write_json(out / "resolved_config.json", config_to_json(config));
  } catch (const std::exception& e) {
    return report_error("output", e.what(), kExitIo);
  }

  for (const auto& [name, run, help] : commands) {
    if (!app.got_subcommand(name)) continue;
    try {
      return run(config, out);
    } catch (const OutputError& e) {
      return report_error("output", e.what(), kExitIo);
    } catch (const fs::filesystem_error& e) {
      return report_error("output", e.what(), kExitIo);
    } catch (const std::exception& e) {
      return report_error(name, e.what(), kExitCheck);
    }
  }
  return kExitCheck;
}
