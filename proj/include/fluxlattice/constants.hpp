#ifndef FLUXLATTICE_CONSTANTS_HPP
#define FLUXLATTICE_CONSTANTS_HPP

#include <cmath>
#include <numbers>

// All model quantities are stored in canonical units: energies as angular
// frequencies (rad/s, hbar = 1). Netlist element values are converted at
// parse time (fF, nH, h*GHz).
namespace fluxlattice::units {

inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double phi0_bar = hbar / (2.0 * elementary_charge);  // Phi_0 / 2pi, Wb
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Kinetic-form coefficient of a capacitance C [F]: the Lagrangian term
// (Phi_0/2pi)^2 (C/2) dphi^2 divided by hbar.
inline double capacitance_coeff(double farad) {
    return phi0_bar * phi0_bar * farad / hbar;
}

// Quadratic-potential coefficient of an inductance L [H]:
// (Phi_0/2pi)^2 / (L hbar), so that U = coeff/2 * dphi^2.
inline double inductance_coeff(double henry) {
    return phi0_bar * phi0_bar / (henry * hbar);
}

// Josephson energies are specified in h*GHz.
inline double josephson_energy(double ghz) { return two_pi * 1e9 * ghz; }

// Charging energy E_C = e^2/(2C) as an angular frequency.
inline double charging_energy(double farad) {
    return elementary_charge * elementary_charge / (2.0 * farad) / hbar;
}

inline double femtofarad(double v) { return v * 1e-15; }
inline double nanohenry(double v) { return v * 1e-9; }

}  // namespace fluxlattice::units

#endif
