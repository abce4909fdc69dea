#pragma once

#include <stdexcept>

namespace bentwire {

// CODATA 2018 exact/recommended values, SI.
namespace codata {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double elementary_charge = 1.602176634e-19;  // C
}  // namespace codata

// hbar^2 / (2 m_e) expressed in meV nm^2 (about 38.0998).
inline constexpr double hbar2_over_2me =
    codata::hbar * codata::hbar / (2.0 * codata::electron_mass) /
    (codata::elementary_charge * 1e-3) * 1e18;

/// Arc-length interval J = (a, b) in nm and the particle mass in units of m_e.
/// Energies are in meV throughout the library.
struct PhysicalParams {
  double a = -5.0;
  double b = 5.0;
  double mass_ratio = 1.0;

  double length() const { return b - a; }

  /// hbar^2 / (2m) in meV nm^2.
  double kinetic_prefactor() const { return hbar2_over_2me / mass_ratio; }

  /// hbar^2 / (8m) in meV nm^2, the prefactor of the geometric potential.
  double geometric_prefactor() const { return 0.25 * kinetic_prefactor(); }

  void validate() const {
    if (!(b > a)) throw std::invalid_argument("interval requires a < b");
    if (!(mass_ratio > 0.0))
      throw std::invalid_argument("mass_ratio must be positive");
  }
};

}  // namespace bentwire
