// bath.hpp — four-pole Lorentzian spectral density, finite-temperature
// correlation function and its exponential-sum expansion.
//
// J(w) = p*w^3 / (L1*L2), L_k = [(w+W_k)^2+G_k^2][(w-W_k)^2+G_k^2].
// C(t)  = (1/pi) Int dw J(w) n(w) e^{iwt}  (Bose n, symmetric range), decomposed
// by closing the contour in the upper half plane: four simple poles of J at
// +-W_k + iG_k plus the Matsubara poles of n at i*2*pi*m/beta. Coefficients of
// the conjugate series follow the pair-swap rule (poles come in +-W pairs).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qnet/types.hpp"
#include "qnet/units.hpp"

namespace qnet {

struct SpectralDensityParams {
    double p = 2.7959e-47;        // amplitude, a.u.
    double omega1 = 3.1892e-8;    // pole positions/widths, a.u. angular frequency
    double gamma1 = 2.1191e-7;
    double omega2 = 1.5222e-7;
    double gamma2 = 9.0678e-9;

    void validate() const {
        if (!(p > 0.0) || !(omega1 > 0.0) || !(gamma1 > 0.0) || !(omega2 > 0.0) || !(gamma2 > 0.0))
            throw std::invalid_argument("SpectralDensityParams: all parameters must be positive");
    }
    // the four simple roots of L1*L2 in the upper half plane
    std::array<cplx, 4> upper_poles() const {
        return {cplx(omega1, gamma1), cplx(-omega1, gamma1), cplx(omega2, gamma2), cplx(-omega2, gamma2)};
    }
    std::array<cplx, 8> all_poles() const {
        std::array<cplx, 8> r;
        auto u = upper_poles();
        for (int i = 0; i < 4; ++i) { r[i] = u[i]; r[i + 4] = std::conj(u[i]); }
        return r;
    }
};

enum class BathRegime { classical, quantum };

struct BathConfig {
    SpectralDensityParams params;
    double temperature_k = 298.0;
    int n_matsubara = -1;              // -1: regime default (1 classical, 10 quantum)
    double eta_target = 0.0;           // 0: use params.p verbatim
    double coupling_scale = 0.125;     // prefactor applied when the expansion is
                                       // attached to the hierarchy (see README)

    void validate() const {
        params.validate();
        if (!(temperature_k > 0.0)) throw std::invalid_argument("BathConfig: temperature must be positive");
        if (n_matsubara < -1) throw std::invalid_argument("BathConfig: n_matsubara must be >= 0");
        if (eta_target < 0.0) throw std::invalid_argument("BathConfig: eta_target must be >= 0");
        if (!(coupling_scale > 0.0)) throw std::invalid_argument("BathConfig: coupling_scale must be positive");
    }
    BathRegime regime() const {
        return units::kb_ha_per_k * temperature_k > params.omega2 ? BathRegime::classical
                                                                  : BathRegime::quantum;
    }
    int resolved_matsubara() const {
        if (n_matsubara >= 0) return n_matsubara;
        return regime() == BathRegime::classical ? 1 : 10;
    }
};

struct BathTerm {
    cplx alpha;        // coefficient of e^{i gamma t} in C(t)
    cplx alpha_tilde;  // coefficient of e^{i gamma t} in C*(t)
    cplx gamma;        // Im(gamma) > 0: decaying term
};

struct BathExpansion {
    std::vector<BathTerm> terms;  // 4 pole terms first, then Matsubara terms
    int n_cor = 0;
    double temperature_k = 0.0;
    int n_matsubara = 0;
    BathRegime regime = BathRegime::classical;

    cplx value(double t) const {
        cplx c = 0.0;
        for (const auto& m : terms) c += m.alpha * std::exp(cplx(0.0, 1.0) * m.gamma * t);
        return c;
    }
    cplx conj_value(double t) const {
        cplx c = 0.0;
        for (const auto& m : terms) c += m.alpha_tilde * std::exp(cplx(0.0, 1.0) * m.gamma * t);
        return c;
    }
};

inline double spectral_density(double omega, const SpectralDensityParams& prm) {
    const double l1 = ((omega + prm.omega1) * (omega + prm.omega1) + prm.gamma1 * prm.gamma1) *
                      ((omega - prm.omega1) * (omega - prm.omega1) + prm.gamma1 * prm.gamma1);
    const double l2 = ((omega + prm.omega2) * (omega + prm.omega2) + prm.gamma2 * prm.gamma2) *
                      ((omega - prm.omega2) * (omega - prm.omega2) + prm.gamma2 * prm.gamma2);
    return prm.p * omega * omega * omega / (l1 * l2);
}

namespace detail {

// e^z - 1 with small-|z| care, complex argument
inline cplx expm1_c(cplx z) {
    if (std::abs(z) < 1e-5) return z * (1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0)));
    return std::exp(z) - 1.0;
}

inline cplx spectral_density_c(cplx omega, const SpectralDensityParams& prm) {
    cplx denom = 1.0;
    for (const cplx& r : prm.all_poles()) denom *= (omega - r);
    return prm.p * omega * omega * omega / denom;
}

}  // namespace detail

inline double bose_occupation(double omega, double temperature_k) {
    if (omega == 0.0) throw std::domain_error("bose_occupation: singular at omega = 0");
    const double z = units::beta_au(temperature_k) * omega;
    if (z > 700.0) return std::exp(-z);  // underflow-safe tail
    if (std::abs(z) < 1e-8) return 1.0 / z - 0.5;
    return 1.0 / std::expm1(z);
}

inline cplx bose_occupation_c(cplx omega, double temperature_k) {
    const cplx z = units::beta_au(temperature_k) * omega;
    if (z.real() > 700.0) return std::exp(-z);
    return 1.0 / detail::expm1_c(z);
}

inline BathExpansion expand_correlation(const BathConfig& cfg) {
    cfg.validate();
    const auto& prm = cfg.params;
    const double beta = units::beta_au(cfg.temperature_k);
    const int nmats = cfg.resolved_matsubara();

    BathExpansion ex;
    ex.temperature_k = cfg.temperature_k;
    ex.n_matsubara = nmats;
    ex.regime = cfg.regime();

    const auto upper = prm.upper_poles();
    const auto all = prm.all_poles();

    // degenerate poles are not supported (simple residues only)
    std::vector<cplx> used(all.begin(), all.end());
    for (int m = 1; m <= nmats; ++m) used.push_back(cplx(0.0, 2.0 * units::pi * m / beta));
    const double scale = std::abs(prm.omega2) + prm.gamma1;
    for (size_t a = 0; a < used.size(); ++a)
        for (size_t b = a + 1; b < used.size(); ++b)
            if (std::abs(used[a] - used[b]) < 1e-12 * scale)
                throw std::runtime_error("expand_correlation: degenerate poles are not supported");

    // C(t) = 2i * sum over UHP poles of Res[J(w) n(w) e^{iwt}]
    for (const cplx& r : upper) {
        cplx denom = 1.0;
        for (const cplx& q : all)
            if (q != r) denom *= (r - q);
        const cplx res = prm.p * r * r * r / denom;
        ex.terms.push_back({cplx(0.0, 2.0) * res * bose_occupation_c(r, cfg.temperature_k), cplx(0.0), r});
    }
    for (int m = 1; m <= nmats; ++m) {
        const cplx g(0.0, 2.0 * units::pi * m / beta);
        ex.terms.push_back({cplx(0.0, 2.0) * detail::spectral_density_c(g, prm) / beta, cplx(0.0), g});
    }

    // conjugate-series coefficients: pair swap among the pole terms, identity
    // for Matsubara terms
    ex.terms[0].alpha_tilde = std::conj(ex.terms[1].alpha);
    ex.terms[1].alpha_tilde = std::conj(ex.terms[0].alpha);
    ex.terms[2].alpha_tilde = std::conj(ex.terms[3].alpha);
    ex.terms[3].alpha_tilde = std::conj(ex.terms[2].alpha);
    for (size_t k = 4; k < ex.terms.size(); ++k) ex.terms[k].alpha_tilde = ex.terms[k].alpha;

    ex.n_cor = static_cast<int>(ex.terms.size());
    return ex;
}

namespace detail {

// composite Gauss-Legendre panels; widths resolve both the spectral peak and
// the e^{iwt} oscillation
inline const std::array<double, 10>& gl_nodes() {
    static const std::array<double, 10> x{-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
                                          -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
                                          0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
                                          0.9739065285171717};
    return x;
}
inline const std::array<double, 10>& gl_weights() {
    static const std::array<double, 10> w{0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
                                          0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
                                          0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                          0.0666713443086881};
    return w;
}

template <typename F>
auto gl_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    decltype(f(a)) acc{};
    for (int i = 0; i < 10; ++i) acc += gl_weights()[i] * f(mid + half * gl_nodes()[i]);
    return half * acc;
}

}  // namespace detail

// Brute-force quadrature of Eq. C(t) = (1/pi) Int J n e^{iwt}; the test oracle
// for expand_correlation. Not used on hot paths.
inline cplx correlation_reference(double t, const BathConfig& cfg) {
    if (t < 0.0) throw std::invalid_argument("correlation_reference: t must be >= 0");
    cfg.validate();
    const auto& prm = cfg.params;
    const double beta = units::beta_au(cfg.temperature_k);

    auto integrand = [&](double w) -> cplx {
        if (w == 0.0) return cplx(0.0);
        const double n = bose_occupation(w, cfg.temperature_k);
        const double j = spectral_density(w, prm);
        return cplx(j * (2.0 * n + 1.0) * std::cos(w * t), -j * std::sin(w * t));
    };

    const double wid_osc = (t > 0.0) ? (2.0 * units::pi / t) / 4.0 : std::numeric_limits<double>::infinity();
    const double core_end = prm.omega2 + 40.0 * prm.gamma2;
    const double wid_core = std::min(prm.gamma2 / 2.0, wid_osc);

    cplx total = 0.0;
    double a = 0.0;
    while (a < core_end) {
        const double b = std::min(a + wid_core, core_end);
        total += detail::gl_panel(integrand, a, b);
        a = b;
    }
    // geometric tail; cut off once both the thermal and algebraic tails are
    // negligible relative to the accumulated value
    const double w_thermal = 40.0 / beta;
    int quiet = 0;
    while (quiet < 4) {
        const double wid = std::min(a / 6.0, wid_osc);
        const cplx inc = detail::gl_panel(integrand, a, a + wid);
        total += inc;
        a += wid;
        if (a > 80.0 * prm.omega2 && a > w_thermal && std::abs(inc) < 1e-11 * std::abs(total))
            ++quiet;
        else
            quiet = 0;
        if (a > 1e6 * prm.omega2)
            throw std::runtime_error("correlation_reference: quadrature tail did not converge");
    }
    return total / units::pi;
}

// lambda = (1/pi) Int_0^inf J(w)/w dw
inline double reorganization_energy(const SpectralDensityParams& prm) {
    prm.validate();
    auto integrand = [&](double w) { return w == 0.0 ? 0.0 : spectral_density(w, prm) / w; };
    const double core_end = prm.omega2 + 40.0 * prm.gamma2;
    const double wid = prm.gamma2 / 2.0;
    double total = 0.0;
    double a = 0.0;
    while (a < core_end) {
        const double b = std::min(a + wid, core_end);
        total += detail::gl_panel(integrand, a, b);
        a = b;
    }
    int quiet = 0;
    while (quiet < 4) {
        const double w = a / 6.0;
        const double inc = detail::gl_panel(integrand, a, a + w);
        total += inc;
        a += w;
        if (a > 200.0 * prm.omega2 && std::abs(inc) < 1e-12 * std::abs(total)) ++quiet;
        if (a > 1e7 * prm.omega2) throw std::runtime_error("reorganization_energy: tail did not converge");
    }
    return total / units::pi;
}

// uphill spectral weight above omega_min: (1/pi) Int_{omega_min}^inf J n dw.
// Relative to C(0) this quantifies how frozen the uphill processes are.
inline double uphill_weight(const BathConfig& cfg, double omega_min) {
    cfg.validate();
    auto integrand = [&](double w) {
        return spectral_density(w, cfg.params) * bose_occupation(w, cfg.temperature_k);
    };
    double total = 0.0;
    double a = omega_min;
    int quiet = 0;
    while (quiet < 3) {
        const double w = std::max(a / 8.0, cfg.params.gamma2 / 2.0);
        const double inc = detail::gl_panel(integrand, a, a + w);
        total += inc;
        a += w;
        if (a > 10.0 * omega_min && std::abs(inc) < 1e-12 * std::abs(total) + 1e-300) ++quiet;
        if (a > 1e7 * cfg.params.omega2) break;
    }
    return total / units::pi;
}

// Golden-rule decay rate 2*pi*|V|^2 * J(w) * [n(w)+1]
inline double golden_rule_rate(double v_coupling, double omega, const BathConfig& cfg) {
    if (!(omega > 0.0)) throw std::invalid_argument("golden_rule_rate: omega must be positive");
    return 2.0 * units::pi * v_coupling * v_coupling * spectral_density(omega, cfg.params) *
           (bose_occupation(omega, cfg.temperature_k) + 1.0);
}

// Solve p so that lambda(p)/omega_gap = eta_target (lambda is linear in p).
inline SpectralDensityParams rescale_to_eta(const SpectralDensityParams& prm, double eta_target,
                                            double omega_gap) {
    if (!(eta_target > 0.0) || !(omega_gap > 0.0))
        throw std::invalid_argument("rescale_to_eta: eta_target and omega_gap must be positive");
    SpectralDensityParams unit = prm;
    unit.p = 1.0;
    SpectralDensityParams out = prm;
    out.p = eta_target * omega_gap / reorganization_energy(unit);
    return out;
}

// Resolve the spectral density actually attached to a run: either the verbatim
// p or the eta_target rescaling against the supplied gap.
inline SpectralDensityParams resolved_params(const BathConfig& cfg, double omega_gap) {
    if (cfg.eta_target > 0.0) return rescale_to_eta(cfg.params, cfg.eta_target, omega_gap);
    return cfg.params;
}

}  // namespace qnet
