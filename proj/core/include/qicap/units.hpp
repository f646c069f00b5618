#ifndef QICAP_UNITS_HPP
#define QICAP_UNITS_HPP

#include <cmath>

#include "qicap/errors.hpp"

// Internal unit system: energies in micro-electron-volts (ueV), times in
// nanoseconds (ns), voltages in volts.  With hbar = 0.6582119569 ueV*ns all
// quantities of this model (tens-of-ueV photon energies, meV drive
// amplitudes, ps..ns timescales) stay within comfortable double range.
// Capacitances are reported in farads; the elementary charge enters only
// through the conversion prefactors below.

namespace qicap {

inline constexpr double kHbarUevNs = 0.6582119569;        // CODATA, ueV*ns
inline constexpr double kElementaryChargeC = 1.602176634e-19;  // exact, C
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Energy {
    double uev = 0.0;
};

struct AngularFrequency {
    double rad_per_ns = 0.0;
};

struct Voltage {
    double volts = 0.0;
};

namespace units {

/// hbar in the internal unit system (ueV*ns).
inline constexpr double hbar() { return kHbarUevNs; }

/// Photon energy hbar*omega in ueV.
inline double photon_energy_uev(AngularFrequency omega) {
    return kHbarUevNs * omega.rad_per_ns;
}

/// Angular frequency for a drive specified in GHz (omega = 2*pi*f).
inline AngularFrequency omega_from_ghz(double f_ghz) {
    return AngularFrequency{kTwoPi * f_ghz};
}

inline double ghz_from_omega(AngularFrequency omega) {
    return omega.rad_per_ns / kTwoPi;
}

/// eps = -2 e alpha_minus (V_TG - V_TG0), returned in ueV.
/// Strictly decreasing in v for alpha_minus > 0.
inline Energy detuning_from_voltage(Voltage v, double alpha_minus, Voltage v0) {
    if (!std::isfinite(v.volts) || !std::isfinite(v0.volts) || !std::isfinite(alpha_minus))
        throw InvalidInput("detuning_from_voltage: non-finite input");
    if (alpha_minus <= 0.0 || alpha_minus >= 1.0)
        throw InvalidInput("detuning_from_voltage: alpha_minus must lie in (0, 1)");
    // e*(1 V) = 1 eV = 1e6 ueV
    return Energy{-2.0 * alpha_minus * (v.volts - v0.volts) * 1e6};
}

/// Exact inverse of detuning_from_voltage.
inline Voltage voltage_from_detuning(Energy eps, double alpha_minus, Voltage v0) {
    if (!std::isfinite(eps.uev) || !std::isfinite(v0.volts) || !std::isfinite(alpha_minus))
        throw InvalidInput("voltage_from_detuning: non-finite input");
    if (alpha_minus == 0.0)
        throw InvalidInput("voltage_from_detuning: alpha_minus = 0 (division by zero)");
    return Voltage{v0.volts - eps.uev * 1e-6 / (2.0 * alpha_minus)};
}

} // namespace units
} // namespace qicap

#endif
