// Physical constants and the natural unit system used throughout the library.
//
// Internally hbar = c = 1, frequencies are measured in units of the plasma
// frequency omega_p and lengths in units of c/omega_p. Pressures therefore
// come out in units of hbar omega_p^4 / c^3.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace casimir {

namespace constants {
// CODATA 2018, 9 significant digits.
inline constexpr double hbar = 1.05457182e-34;          // J s
inline constexpr double c = 299792458.0;                // m / s (exact)
inline constexpr double e_charge = 1.60217663e-19;      // C
inline constexpr double m_electron = 9.10938370e-31;    // kg
inline constexpr double epsilon0 = 8.85418781e-12;      // F / m
inline constexpr double bohr_radius = 5.29177211e-11;   // m
inline constexpr double angstrom = 1e-10;               // m
inline constexpr double nanometer = 1e-9;               // m
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

/// Casimir's ideal-mirror pressure pi^2 / (240 L^4) in natural units.
inline double ideal_casimir_pressure(double L)
{
    return constants::pi * constants::pi / (240.0 * L * L * L * L);
}

/// Ideal-mirror interaction energy per area pi^2 / (720 L^3) in natural units.
inline double ideal_casimir_energy(double L)
{
    return constants::pi * constants::pi / (720.0 * L * L * L);
}

/**
 * Conversion between SI and the natural units anchored at a plasma
 * frequency. Immutable once built.
 */
class UnitSystem
{
public:
    explicit UnitSystem(double omega_p_si) : omega_p_(omega_p_si)
    {
        if (!(omega_p_si > 0.0) || !std::isfinite(omega_p_si))
            throw std::domain_error("UnitSystem: plasma frequency must be positive and finite");
    }

    double omega_p() const { return omega_p_; }

    /// c / omega_p in metres.
    double length_unit() const { return constants::c / omega_p_; }
    /// hbar omega_p^4 / c^3 in pascal.
    double pressure_unit() const
    {
        const double k = omega_p_ / constants::c;
        return constants::hbar * omega_p_ * k * k * k;
    }
    /// hbar omega_p^3 / c^2 in J / m^2.
    double energy_per_area_unit() const
    {
        const double k = omega_p_ / constants::c;
        return constants::hbar * omega_p_ * k * k;
    }

    double length_to_natural(double metres) const { return metres / length_unit(); }
    double length_to_si(double natural) const { return natural * length_unit(); }
    double frequency_to_natural(double rad_per_s) const { return rad_per_s / omega_p_; }
    double frequency_to_si(double natural) const { return natural * omega_p_; }
    double pressure_to_natural(double pascal) const { return pascal / pressure_unit(); }
    double pressure_to_si(double natural) const { return natural * pressure_unit(); }
    double energy_per_area_to_si(double natural) const { return natural * energy_per_area_unit(); }

private:
    double omega_p_;
};

}  // namespace casimir
