// units.hpp — atomic-unit conversions for the quantities named in run configurations.
//
// All internal computation is in Hartree atomic units (hbar = 1). Boundary
// quantities follow the conventions of the experimental platform: frequencies
// are ordinary frequencies nu (GHz), converted to angular a.u. via
// omega = 2*pi*nu; durations in ns; temperatures in K; emission rates in MHz
// (plain rate constants, 1e6 s^-1); pulse energies in units of 1e-8 hartree.
#pragma once

#include <numbers>

namespace qnet::units {

inline constexpr double au_time_s   = 2.4188843265857e-17;  // seconds per a.u. of time
inline constexpr double kb_ha_per_k = 3.166811563e-6;       // Boltzmann constant, Ha/K

inline constexpr double pi = std::numbers::pi;

// ordinary frequency (GHz) -> angular frequency (a.u.)
inline constexpr double ghz_to_au(double nu_ghz) {
    return 2.0 * pi * nu_ghz * 1e9 * au_time_s;
}
inline constexpr double au_to_ghz(double w_au) {
    return w_au / (2.0 * pi * 1e9 * au_time_s);
}

// duration (ns) <-> a.u. of time
inline constexpr double ns_to_au(double t_ns) { return t_ns * 1e-9 / au_time_s; }
inline constexpr double au_to_ns(double t_au) { return t_au * au_time_s * 1e9; }

// plain rate constant (MHz, i.e. 1e6 s^-1) -> a.u.
inline constexpr double mhz_rate_to_au(double g_mhz) { return g_mhz * 1e6 * au_time_s; }

// pulse energy, boundary units of 1e-8 hartree
inline constexpr double e8ha_to_au(double e) { return e * 1e-8; }
inline constexpr double au_to_e8ha(double e) { return e * 1e8; }

inline constexpr double beta_au(double temperature_k) {
    return 1.0 / (kb_ha_per_k * temperature_k);
}

}  // namespace qnet::units
