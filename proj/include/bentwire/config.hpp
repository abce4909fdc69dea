#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bentwire/convergence.hpp"

namespace bentwire {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything a CLI run needs. Defaults are the bent-wire example: J = (-5, 5) nm,
/// alpha = 1/2, theta = pi/8, m = m_e, Dirichlet, 16000 cells, four states.
struct RunConfig {
  // problem
  double alpha = 0.5;
  double theta = 0.39269908169872414;  // pi / 8
  double a = -5.0;
  double b = 5.0;
  double mass_ratio = 1.0;

  // numerics
  int n_cells = 16000;
  int k_states = 4;
  std::vector<double> epsilons;  // explicit sweep; generated from the range fields when empty
  double eps_max = 1.0;
  double eps_min = 0x1p-14;
  double eps_factor = 0.5;
  std::string bc = "dirichlet";
  std::string formulation = "regular";
  double epsilon = 0.01;  // single-epsilon runs (spectrum)
  std::vector<double> trace_epsilons{1.0, 0.5, 0.1, 0.01};
  std::vector<double> thetas;                  // angle scan; default k pi / 16, k = 1..15
  std::vector<double> admissibility_epsilons;  // default 10^0 .. 10^-8
  double bump_height = 0.0;                    // squared-curvature defect P (1/nm), 0 = none
  double bump_center = 0.0;
  double bump_width_scale = 1.0;
  double bump_width_exponent = 1.0;

  // output
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};

  /// Sweep epsilons, explicit or generated eps_max * eps_factor^j down to eps_min.
  std::vector<double> sweep_epsilons() const;
  std::vector<double> scan_thetas() const;
  std::vector<double> admissibility_eps() const;

  PhysicalParams params() const { return PhysicalParams{a, b, mass_ratio}; }
  double amplitude() const;
  SweepProblem problem() const;

  /// Throws ConfigError on the first violated precondition.
  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
/// Fully resolved form (all lists explicit); re-ingests to an identical run.
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

}  // namespace bentwire
