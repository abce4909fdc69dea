#include "bentwire/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace bentwire {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

nlohmann::json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::strtod(format_number(value).c_str(), nullptr);
}

nlohmann::json json_numbers(const std::vector<double>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (double v : values) out.push_back(json_number(v));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw OutputError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string trace_csv(const CurveTrace& trace) {
  std::string out = "s,x,y,gamma\n";
  for (std::size_t i = 0; i < trace.s_grid.size(); ++i) {
    out += format_number(trace.s_grid[i]) + ',' + format_number(trace.positions[i].x) + ',' +
           format_number(trace.positions[i].y) + ',' + format_number(trace.angles[i]) + '\n';
  }
  return out;
}

std::string curvature_csv(const std::vector<double>& s_grid, const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& columns) {
  std::string out = "s";
  for (const auto& n : names) out += ',' + n;
  out += '\n';
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    out += format_number(s_grid[i]);
    for (const auto& c : columns) out += ',' + format_number(c[i]);
    out += '\n';
  }
  return out;
}

std::string eigenvalues_csv(const Spectrum& spectrum) {
  std::string out = "n,eigenvalue_meV\n";
  for (std::size_t n = 0; n < spectrum.size(); ++n)
    out += std::to_string(n) + ',' + format_number(spectrum.eigenvalues[n]) + '\n';
  return out;
}

std::string state_csv(const Spectrum& spectrum, std::size_t n) {
  std::string out = "s,psi\n";
  const auto& psi = spectrum.eigenfunctions.at(n);
  for (std::size_t i = 0; i < psi.size(); ++i)
    out += format_number(spectrum.nodes[i]) + ',' + format_number(psi[i]) + '\n';
  return out;
}

std::string density_csv(const Spectrum& spectrum, std::size_t n) {
  std::string out = "s,psi_sq\n";
  const auto& psi = spectrum.eigenfunctions.at(n);
  for (std::size_t i = 0; i < psi.size(); ++i)
    out += format_number(spectrum.nodes[i]) + ',' + format_number(psi[i] * psi[i]) + '\n';
  return out;
}

nlohmann::json spectrum_json(const Spectrum& spectrum) {
  nlohmann::json j;
  j["epsilon"] = spectrum.epsilon_tag ? json_number(*spectrum.epsilon_tag) : nlohmann::json(nullptr);
  j["bc"] = spectrum.bc_tag;
  j["formulation"] = to_string(spectrum.formulation);
  j["n_cells"] = spectrum.mesh.n_cells;
  j["eigenvalues"] = json_numbers(spectrum.eigenvalues);
  j["residuals"] = json_numbers(spectrum.residuals);
  j["converged"] = spectrum.converged;
  return j;
}

nlohmann::json track_json(const EigenTrack& track) {
  nlohmann::json j;
  j["n"] = track.n;
  j["members"] = track.members;
  j["values"] = json_numbers(track.values);
  j["limit"] = json_number(track.extrapolation.limit);
  j["uncertainty"] = json_number(track.extrapolation.uncertainty);
  j["rate"] = json_number(track.extrapolation.rate);
  j["flagged"] = track.extrapolation.flagged;
  j["ambiguous"] = track.ambiguous;
  return j;
}

nlohmann::json sweep_json(const SweepResult& result) {
  nlohmann::json j;
  j["epsilons"] = json_numbers(result.epsilons);
  j["tracks"] = nlohmann::json::array();
  for (const auto& t : result.tracks) j["tracks"].push_back(track_json(t));
  j["overlaps"] = json_numbers(result.overlaps);
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& p : result.points) errors.push_back(p.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(p.error));
  j["errors"] = errors;
  if (result.admissibility) j["admissibility"] = admissibility_json(*result.admissibility);
  return j;
}

nlohmann::json admissibility_json(const AdmissibilityReport& report) {
  nlohmann::json j;
  j["epsilons"] = json_numbers(report.epsilons);
  j["l1_errors"] = json_numbers(report.l1_curvature_errors);
  j["l2_errors"] = json_numbers(report.l2_primitive_errors);
  j["l2_branchwise_errors"] = json_numbers(report.l2_branchwise_errors);
  j["l2_slope"] = json_number(report.l2_slope);
  j["l1_converging"] = report.l1_converging;
  j["l2_converging"] = report.l2_converging;
  j["verdict"] = to_string(report.verdict);
  return j;
}

std::string anglescan_csv(const std::vector<AngleScanPoint>& points) {
  std::string out = "theta,E0_meV\n";
  for (const auto& p : points) out += format_number(p.theta) + ',' + format_number(p.ground_energy) + '\n';
  return out;
}

}  // namespace bentwire
