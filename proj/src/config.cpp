#include "bentwire/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace bentwire {

namespace {

using nlohmann::json;

void check_keys(const json& section, const std::string& name, const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items())
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + name + "." + key + "'");
}

template <class T>
void read(const json& section, const char* key, T& target) {
  if (!section.contains(key)) return;
  try {
    target = section.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type: " + ex.what());
  }
}

bool strictly_decreasing_positive(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) return false;
    if (i > 0 && !(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

std::vector<double> RunConfig::sweep_epsilons() const {
  if (!epsilons.empty()) return epsilons;
  if (!(eps_factor > 0.0 && eps_factor < 1.0) || !(eps_max > 0.0) || !(eps_min > 0.0) || eps_min > eps_max)
    throw ConfigError("epsilon range needs 0 < eps_min <= eps_max and 0 < eps_factor < 1");
  std::vector<double> out;
  for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e *= eps_factor) out.push_back(e);
  return out;
}

std::vector<double> RunConfig::scan_thetas() const {
  if (!thetas.empty()) return thetas;
  std::vector<double> out;
  for (int k = 1; k <= 15; ++k) out.push_back(k * std::numbers::pi / 16.0);
  return out;
}

std::vector<double> RunConfig::admissibility_eps() const {
  if (!admissibility_epsilons.empty()) return admissibility_epsilons;
  std::vector<double> out;
  for (int k = 0; k <= 8; ++k) out.push_back(std::pow(10.0, -k));
  return out;
}

double RunConfig::amplitude() const { return power_law_amplitude(alpha, theta, a, b); }

SweepProblem RunConfig::problem() const {
  SweepProblem p;
  p.base = CurvatureSpec::power_law(amplitude(), alpha);
  p.params = params();
  p.bc = parse_bc(bc);
  p.n_cells = n_cells;
  p.k_states = k_states;
  if (bump_height != 0.0)
    p.defect = BumpDefect{bump_height, bump_center, WidthRule{bump_width_scale, bump_width_exponent}};
  return p;
}

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 0.75)) throw ConfigError("alpha must lie in (0, 3/4)");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ConfigError("theta must lie in [0, pi]");
  if (!(a < 0.0 && b > 0.0)) throw ConfigError("interval must satisfy a < 0 < b");
  if (!(mass_ratio > 0.0) || !std::isfinite(mass_ratio)) throw ConfigError("mass_ratio must be positive");
  if (n_cells < 2) throw ConfigError("n_cells must be at least 2");
  const double offset = -a / ((b - a) / n_cells) - 0.5;
  if (std::abs(offset - std::round(offset)) < 1e-9)
    throw ConfigError("s = 0 falls on a staggered node; change n_cells or the interval");
  if (k_states < 1 || k_states > n_cells - 1) throw ConfigError("k_states must lie in [1, n_cells - 1]");
  const auto eps = sweep_epsilons();
  if (eps.size() < 4) throw ConfigError("sweep needs at least four epsilons");
  if (!strictly_decreasing_positive(eps)) throw ConfigError("sweep epsilons must be positive and strictly decreasing");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (trace_epsilons.empty()) throw ConfigError("trace_epsilons must not be empty");
  for (double e : trace_epsilons)
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("trace epsilons must be positive");
  for (double t : scan_thetas())
    if (!(t > 0.0 && t <= std::numbers::pi)) throw ConfigError("scan angles must lie in (0, pi]");
  const auto adm = admissibility_eps();
  if (adm.size() < 3 || !strictly_decreasing_positive(adm))
    throw ConfigError("admissibility epsilons must be at least three, positive and strictly decreasing");
  if (!std::isfinite(bump_height) || !std::isfinite(bump_center)) throw ConfigError("bump parameters must be finite");
  if (!(bump_width_scale > 0.0) || !(bump_width_exponent > 0.0))
    throw ConfigError("bump width rule needs positive scale and exponent");
  if (formulation != "regular" && formulation != "quasi") throw ConfigError("formulation must be regular or quasi");
  BoundaryConditions parsed;
  try {
    parsed = parse_bc(bc);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  if (formulation == "quasi" && parsed.preset != BcPreset::Dirichlet)
    throw ConfigError("the quasi formulation supports Dirichlet conditions only");
  if (directory.empty()) throw ConfigError("output directory must not be empty");
  for (const auto& f : formats)
    if (f != "csv" && f != "json") throw ConfigError("unknown output format '" + f + "'");
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  check_keys(j, "root", {"problem", "numerics", "output"});
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    check_keys(p, "problem", {"alpha", "theta_rad", "a_nm", "b_nm", "mass_ratio"});
    read(p, "alpha", c.alpha);
    read(p, "theta_rad", c.theta);
    read(p, "a_nm", c.a);
    read(p, "b_nm", c.b);
    read(p, "mass_ratio", c.mass_ratio);
  }
  if (j.contains("numerics")) {
    const auto& n = j.at("numerics");
    check_keys(n, "numerics",
               {"n_cells", "k_states", "epsilons", "eps_min", "eps_max", "eps_factor", "bc", "formulation", "epsilon",
                "trace_epsilons", "thetas", "admissibility_epsilons", "bump_height", "bump_center",
                "bump_width_scale", "bump_width_exponent"});
    read(n, "n_cells", c.n_cells);
    read(n, "k_states", c.k_states);
    read(n, "epsilons", c.epsilons);
    read(n, "eps_min", c.eps_min);
    read(n, "eps_max", c.eps_max);
    read(n, "eps_factor", c.eps_factor);
    read(n, "bc", c.bc);
    read(n, "formulation", c.formulation);
    read(n, "epsilon", c.epsilon);
    read(n, "trace_epsilons", c.trace_epsilons);
    read(n, "thetas", c.thetas);
    read(n, "admissibility_epsilons", c.admissibility_epsilons);
    read(n, "bump_height", c.bump_height);
    read(n, "bump_center", c.bump_center);
    read(n, "bump_width_scale", c.bump_width_scale);
    read(n, "bump_width_exponent", c.bump_width_exponent);
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    check_keys(o, "output", {"directory", "formats"});
    read(o, "directory", c.directory);
    read(o, "formats", c.formats);
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["problem"] = {{"alpha", c.alpha}, {"theta_rad", c.theta}, {"a_nm", c.a}, {"b_nm", c.b}, {"mass_ratio", c.mass_ratio}};
  j["numerics"] = {{"n_cells", c.n_cells},
                   {"k_states", c.k_states},
                   {"epsilons", c.sweep_epsilons()},
                   {"bc", c.bc},
                   {"formulation", c.formulation},
                   {"epsilon", c.epsilon},
                   {"trace_epsilons", c.trace_epsilons},
                   {"thetas", c.scan_thetas()},
                   {"admissibility_epsilons", c.admissibility_eps()},
                   {"bump_height", c.bump_height},
                   {"bump_center", c.bump_center},
                   {"bump_width_scale", c.bump_width_scale},
                   {"bump_width_exponent", c.bump_width_exponent}};
  j["output"] = {{"directory", c.directory}, {"formats", c.formats}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  return config_from_json(j);
}

}  // namespace bentwire
