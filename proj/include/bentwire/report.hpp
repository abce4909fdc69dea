#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bentwire/convergence.hpp"
#include "bentwire/geometry.hpp"
#include "bentwire/regularization.hpp"
#include "bentwire/spectral.hpp"

namespace bentwire {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 12 significant digits, '.' decimal point, "nan" for NaN.
std::string format_number(double value);

/// value rounded to 12 significant digits as a JSON number (null for NaN/inf).
nlohmann::json json_number(double value);
nlohmann::json json_numbers(const std::vector<double>& values);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

std::string trace_csv(const CurveTrace& trace);
std::string curvature_csv(const std::vector<double>& s_grid, const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& columns);
std::string eigenvalues_csv(const Spectrum& spectrum);
std::string state_csv(const Spectrum& spectrum, std::size_t n);
std::string density_csv(const Spectrum& spectrum, std::size_t n);
nlohmann::json spectrum_json(const Spectrum& spectrum);

nlohmann::json track_json(const EigenTrack& track);
nlohmann::json sweep_json(const SweepResult& result);
nlohmann::json admissibility_json(const AdmissibilityReport& report);
std::string anglescan_csv(const std::vector<AngleScanPoint>& points);

}  // namespace bentwire
