// driving.hpp — sine-squared microwave pulse with constant-energy normalization.
//
// E(t) = A sin^2(pi t / tau_max) cos(w_c t) on [0, tau_max], zero outside.
// The pulse energy Int E^2 dt has a closed form; A is solved from it so a
// (energy, duration) family has constant integrated intensity.
#pragma once

#include <cmath>
#include <stdexcept>

#include "qnet/units.hpp"

namespace qnet {

struct Pulse {
    double amplitude = 0.0;  // A, a.u. field
    double tau_max = 0.0;    // support, a.u. time
    double carrier = 0.0;    // w_c, a.u. angular frequency

    bool enabled() const { return amplitude != 0.0 && tau_max > 0.0; }
};

inline double field_value(double t, const Pulse& p) {
    if (t < 0.0 || t > p.tau_max || !p.enabled()) return 0.0;
    const double env = std::sin(units::pi * t / p.tau_max);
    return p.amplitude * env * env * std::cos(p.carrier * t);
}

namespace detail {

inline double cosint(double a, double upto) {  // Int_0^T cos(a t) dt
    if (a == 0.0) return upto;
    return std::sin(a * upto) / a;
}

// Int_0^tau sin^4(pi t/tau) cos^2(w t) dt, exact
inline double pulse_shape_integral(double tau, double w) {
    const double k = 2.0 * units::pi / tau;
    double i = (3.0 / 16.0) * tau;
    i += (3.0 / 16.0) * cosint(2.0 * w, tau);
    i -= (1.0 / 8.0) * (cosint(k - 2.0 * w, tau) + cosint(k + 2.0 * w, tau));
    i += (1.0 / 32.0) * (cosint(2.0 * k - 2.0 * w, tau) + cosint(2.0 * k + 2.0 * w, tau));
    return i;
}

}  // namespace detail

inline double pulse_energy(const Pulse& p) {
    if (!p.enabled()) return 0.0;
    return p.amplitude * p.amplitude * detail::pulse_shape_integral(p.tau_max, p.carrier);
}

// true when the pulse contains many carrier cycles (the regime of the
// (3/16)*tau energy approximation)
inline bool is_many_cycle(double carrier, double tau_max) { return carrier * tau_max > 20.0; }

inline double amplitude_for_energy(double energy, double tau_max, double carrier) {
    if (!(energy > 0.0) || !(tau_max > 0.0) || !(carrier > 0.0))
        throw std::invalid_argument("amplitude_for_energy: energy, tau_max and carrier must be positive");
    return std::sqrt(energy / detail::pulse_shape_integral(tau_max, carrier));
}

inline Pulse make_pulse_from_energy(double energy, double tau_max, double carrier) {
    Pulse p;
    p.tau_max = tau_max;
    p.carrier = carrier;
    p.amplitude = amplitude_for_energy(energy, tau_max, carrier);
    return p;
}

}  // namespace qnet
