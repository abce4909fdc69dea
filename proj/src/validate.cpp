#include "bentwire/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bentwire/geometry.hpp"
#include "bentwire/regularization.hpp"
#include "bentwire/spectral.hpp"

namespace bentwire {

double four_figure_tolerance(double x) {
  return 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(x))) - 3.0);
}

std::vector<OracleCheck> run_oracle_suite(int n_cells) {
  std::vector<OracleCheck> checks;
  const double pi = std::numbers::pi;
  const PhysicalParams params;

  {
    const Mesh mesh = Mesh::uniform(params.a, params.b, n_cells);
    const auto V = geometric_potential(CurvatureSpec::zero(), params, mesh);
    const auto T = assemble_regular(V, params, mesh, canonical_bc(BcPreset::Dirichlet));
    const Spectrum s = eigen_lowest(T, 4);
    const double L = params.length();
    for (int n = 1; n <= 4; ++n) {
      const double exact = n * n * pi * pi * params.kinetic_prefactor() / (L * L);
      const double tol = four_figure_tolerance(exact);
      const double got = s.eigenvalues[n - 1];
      checks.push_back({"box_E" + std::to_string(n), got, exact, tol, std::abs(got - exact) <= tol});
    }
  }
  {
    const double R = 2.0;
    const auto trace = reconstruct_trace(CurvatureSpec::constant(1.0 / R), params, 10000, Pose{});
    double dev = 0.0;
    for (const auto& p : trace.positions) dev = std::max(dev, std::abs(std::hypot(p.x, p.y - R) - R));
    checks.push_back({"circle_radial_deviation", dev, 0.0, 1e-6 * R, dev < 1e-6 * R});
  }
  {
    TridiagonalOperator T;
    T.diag = {2.0, 2.0, 2.0};
    T.offdiag = {-1.0, -1.0};
    T.mesh = Mesh{0.0, 3.0, 3, 1.0};
    const Spectrum s = eigen_lowest(T, 3);
    const double exact[3] = {2.0 - std::sqrt(2.0), 2.0, 2.0 + std::sqrt(2.0)};
    for (int i = 0; i < 3; ++i)
      checks.push_back({"tridiag3_lambda" + std::to_string(i + 1), s.eigenvalues[i], exact[i], 1e-12,
                        std::abs(s.eigenvalues[i] - exact[i]) <= 1e-12});
  }
  {
    const double theta = pi / 8.0;
    const double K = power_law_amplitude(0.5, theta, params.a, params.b);
    const double turn = total_turn(CurvatureSpec::power_law(K, 0.5), params);
    const double exact = pi - theta;
    checks.push_back({"total_turn", turn, exact, 1e-9 * exact, std::abs(turn - exact) <= 1e-9 * exact});
  }
  return checks;
}

}  // namespace bentwire
