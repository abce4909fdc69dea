#pragma once

#include <string>
#include <vector>

namespace bentwire {

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Analytic checks of the built library: Dirichlet box energies n = 1..4
/// to four significant figures, circle reconstruction, the 3x3 tridiagonal
/// closed form, and the total turn of the default power-law curve.
std::vector<OracleCheck> run_oracle_suite(int n_cells = 16000);

/// Half a unit in the fourth significant digit of x.
double four_figure_tolerance(double x);

}  // namespace bentwire
