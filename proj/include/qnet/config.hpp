// config.hpp — run configuration: flat key-value document with dotted section
// names, strict unknown-key rejection, unit conversion at the boundary, and a
// canonical echo such that parse(echo(cfg)) == cfg.
//
// Grammar (one entry per line):
//   key = value            key: dotted lowercase identifiers
//   # comment               value: number | token | comma-separated list
// Unknown keys, malformed lines, range and unit violations are errors carrying
// the line number.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/bath.hpp"
#include "qnet/network.hpp"
#include "qnet/units.hpp"

namespace qnet {

enum class RunMode { trajectory, field_free, scan, convergence };

inline std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::trajectory: return "trajectory";
        case RunMode::field_free: return "field_free";
        case RunMode::scan: return "scan";
        case RunMode::convergence: return "convergence";
    }
    return "?";
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PulseConfig {
    bool enabled = true;
    double energy_1e8ha = 5.0;     // exclusive with amplitude_au
    double amplitude_au = 0.0;     // explicit A; set => energy ignored
    bool explicit_amplitude = false;
    double tau_ns = 50.0;
    double carrier_ghz = 0.0;      // 0: auto (computed g->B gap)
};

struct RatesConfig {
    double g3_mhz = 10.0;
    double g12_mhz = 10.0;
};

struct IntegratorSettings {
    double rel_tol = 1e-7;
    double abs_tol = 1e-10;
    double initial_step_au = 1e5;
    double max_step_au = 0.0;
    double t_final_ns = 500.0;
    int level = -1;                 // -1: regime default (4 classical, 5 quantum)
    bool scaled_ados = true;
};

struct HeomSettings {
    double mode_cutoff = 1e-12;
    std::size_t max_ados = 2'000'000;
    int rhs_threads = 1;
};

struct OutputConfig {
    std::string dir = "out";
    bool write_trajectory = true;
    bool write_metadata = true;
    bool write_eigen_report = true;
    bool write_bath_expansion = true;
};

struct ScanConfig {
    std::vector<double> energies_1e8ha{1, 2.5, 5, 10, 20, 40};
    std::vector<double> durations_ns{5, 25, 50, 100, 150, 200, 250};
    int threads = 0;  // 0: QNET_THREADS env or hardware
};

struct ConvergenceConfig {
    std::vector<int> levels;      // empty: {resolved level, level+1}
    std::vector<int> matsubara;   // empty: {resolved n_matsubara}
};

struct RunConfig {
    RunMode mode = RunMode::trajectory;
    NetworkSpec network;
    bool bath_enabled = true;
    BathConfig bath;
    bool renormalization = true;
    PulseConfig pulse;
    RatesConfig rates;
    std::string initial_state = "ground";
    IntegratorSettings integrator;
    HeomSettings heom;
    double grid_ns = 0.5;
    OutputConfig output;
    ScanConfig scan;
    ConvergenceConfig convergence;

    int resolved_level() const {
        if (integrator.level >= 0) return integrator.level;
        return bath.regime() == BathRegime::classical ? 4 : 5;
    }

    bool operator==(const RunConfig&) const = default;
};

inline bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
    return a.omega_ghz == b.omega_ghz && a.coupling_ghz == b.coupling_ghz &&
           a.dipole_sites == b.dipole_sites && a.dipole_moment_au == b.dipole_moment_au &&
           a.noise_site == b.noise_site;
}
inline bool operator==(const SpectralDensityParams& a, const SpectralDensityParams& b) {
    return a.p == b.p && a.omega1 == b.omega1 && a.gamma1 == b.gamma1 && a.omega2 == b.omega2 &&
           a.gamma2 == b.gamma2;
}
inline bool operator==(const BathConfig& a, const BathConfig& b) {
    return a.params == b.params && a.temperature_k == b.temperature_k && a.n_matsubara == b.n_matsubara &&
           a.eta_target == b.eta_target && a.coupling_scale == b.coupling_scale;
}
inline bool operator==(const PulseConfig& a, const PulseConfig& b) {
    return a.enabled == b.enabled && a.energy_1e8ha == b.energy_1e8ha && a.amplitude_au == b.amplitude_au &&
           a.explicit_amplitude == b.explicit_amplitude && a.tau_ns == b.tau_ns &&
           a.carrier_ghz == b.carrier_ghz;
}
inline bool operator==(const RatesConfig& a, const RatesConfig& b) {
    return a.g3_mhz == b.g3_mhz && a.g12_mhz == b.g12_mhz;
}
inline bool operator==(const IntegratorSettings& a, const IntegratorSettings& b) {
    return a.rel_tol == b.rel_tol && a.abs_tol == b.abs_tol && a.initial_step_au == b.initial_step_au &&
           a.max_step_au == b.max_step_au && a.t_final_ns == b.t_final_ns && a.level == b.level &&
           a.scaled_ados == b.scaled_ados;
}
inline bool operator==(const HeomSettings& a, const HeomSettings& b) {
    return a.mode_cutoff == b.mode_cutoff && a.max_ados == b.max_ados && a.rhs_threads == b.rhs_threads;
}
inline bool operator==(const OutputConfig& a, const OutputConfig& b) {
    return a.dir == b.dir && a.write_trajectory == b.write_trajectory &&
           a.write_metadata == b.write_metadata && a.write_eigen_report == b.write_eigen_report &&
           a.write_bath_expansion == b.write_bath_expansion;
}
inline bool operator==(const ScanConfig& a, const ScanConfig& b) {
    return a.energies_1e8ha == b.energies_1e8ha && a.durations_ns == b.durations_ns &&
           a.threads == b.threads;
}
inline bool operator==(const ConvergenceConfig& a, const ConvergenceConfig& b) {
    return a.levels == b.levels && a.matsubara == b.matsubara;
}

namespace detail {

struct KeyValue {
    std::string value;
    int line = 0;
    bool consumed = false;
};

class ConfigReader {
public:
    explicit ConfigReader(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int ln = 0;
        while (std::getline(in, line)) {
            ++ln;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string t = trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(ln) + ": expected 'key = value'");
            const std::string key = trim(t.substr(0, eq));
            const std::string val = trim(t.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(ln) + ": empty key");
            if (entries_.count(key))
                throw ConfigError("line " + std::to_string(ln) + ": duplicate key '" + key + "'");
            entries_[key] = {val, ln, false};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> raw(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.consumed = true;
        return it->second.value;
    }

    int line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line_of(key)) + ": key '" + key + "': " + msg);
    }

    double number(const std::string& key, double fallback) {
        auto r = raw(key);
        if (!r) return fallback;
        return parse_number(key, *r);
    }
    int integer(const std::string& key, int fallback) {
        auto r = raw(key);
        if (!r) return fallback;
        const double d = parse_number(key, *r);
        if (d != std::floor(d)) fail(key, "expected an integer, got '" + *r + "'");
        return static_cast<int>(d);
    }
    bool boolean(const std::string& key, bool fallback) {
        auto r = raw(key);
        if (!r) return fallback;
        if (*r == "true") return true;
        if (*r == "false") return false;
        fail(key, "expected true/false, got '" + *r + "'");
    }
    std::string token(const std::string& key, const std::string& fallback) {
        auto r = raw(key);
        return r ? *r : fallback;
    }
    std::vector<double> number_list(const std::string& key, std::vector<double> fallback) {
        auto r = raw(key);
        if (!r) return fallback;
        std::vector<double> out;
        for (const std::string& item : split(*r)) out.push_back(parse_number(key, item));
        if (out.empty()) fail(key, "expected a non-empty list");
        return out;
    }
    std::vector<int> int_list(const std::string& key, std::vector<int> fallback) {
        auto r = raw(key);
        if (!r) return fallback;
        std::vector<int> out;
        for (const std::string& item : split(*r)) {
            const double d = parse_number(key, item);
            if (d != std::floor(d)) fail(key, "expected integers");
            out.push_back(static_cast<int>(d));
        }
        return out;
    }

    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : entries_)
            if (!v.consumed) unknown.push_back("line " + std::to_string(v.line) + ": unknown key '" + k + "'");
        if (!unknown.empty()) {
            std::string msg = "unrecognized configuration keys:";
            for (const auto& u : unknown) msg += "\n  " + u;
            throw ConfigError(msg);
        }
    }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }
    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream in(s);
        while (std::getline(in, cur, ',')) out.push_back(trim(cur));
        return out;
    }
    double parse_number(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(s, &pos);
            if (pos != s.size()) fail(key, "trailing characters in number '" + s + "'");
            return d;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail(key, "not a number: '" + s + "'");
        }
    }

    std::map<std::string, KeyValue> entries_;
};

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    detail::ConfigReader r(text);
    RunConfig cfg;

    const std::string mode = r.token("mode", "trajectory");
    if (mode == "trajectory") cfg.mode = RunMode::trajectory;
    else if (mode == "field_free") cfg.mode = RunMode::field_free;
    else if (mode == "scan") cfg.mode = RunMode::scan;
    else if (mode == "convergence") cfg.mode = RunMode::convergence;
    else r.fail("mode", "expected trajectory|field_free|scan|convergence, got '" + mode + "'");

    // network
    {
        auto om = r.number_list("network.omega_ghz", {12.0, 12.0, 11.5});
        if (om.size() != 3) r.fail("network.omega_ghz", "expected 3 frequencies");
        std::copy(om.begin(), om.end(), cfg.network.omega_ghz.begin());
        for (int i = 0; i < 3; ++i)
            if (!(cfg.network.omega_ghz[i] > 0.0))
                r.fail("network.omega_ghz", "frequency " + std::to_string(i + 1) + " must be positive");

        std::vector<double> jflat;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) jflat.push_back(NetworkSpec::default_coupling()(i, j));
        jflat = r.number_list("network.coupling_ghz", jflat);
        if (jflat.size() != 9) r.fail("network.coupling_ghz", "expected 9 row-major entries");
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cfg.network.coupling_ghz(i, j) = jflat[i * 3 + j];
        for (int i = 0; i < 3; ++i) {
            if (cfg.network.coupling_ghz(i, i) != 0.0)
                r.fail("network.coupling_ghz", "diagonal entry (" + std::to_string(i + 1) + "," +
                                                   std::to_string(i + 1) + ") must be zero");
            for (int j = i + 1; j < 3; ++j)
                if (cfg.network.coupling_ghz(i, j) != cfg.network.coupling_ghz(j, i))
                    r.fail("network.coupling_ghz", "asymmetric entries (" + std::to_string(i + 1) + "," +
                                                       std::to_string(j + 1) + ") vs (" + std::to_string(j + 1) +
                                                       "," + std::to_string(i + 1) + ")");
        }

        auto sites = r.int_list("network.dipole_sites", {1, 2});
        cfg.network.dipole_sites = sites;
        cfg.network.dipole_moment_au = r.number("network.dipole_moment_au", 1.0);
        cfg.network.noise_site = r.integer("network.noise_site", 2);
        cfg.renormalization = r.boolean("network.include_renormalization", true);
        try {
            cfg.network.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("network: ") + e.what());
        }
    }

    // bath
    {
        cfg.bath_enabled = r.boolean("bath.enabled", true);
        const bool has_p = r.has("bath.p_au");
        const bool has_eta = r.has("bath.eta_target");
        if (has_p && has_eta)
            r.fail("bath.eta_target", "bath.p_au and bath.eta_target are mutually exclusive");
        cfg.bath.params.p = r.number("bath.p_au", cfg.bath.params.p);
        cfg.bath.eta_target = r.number("bath.eta_target", 0.0);
        cfg.bath.params.omega1 = r.number("bath.omega1_au", cfg.bath.params.omega1);
        cfg.bath.params.gamma1 = r.number("bath.gamma1_au", cfg.bath.params.gamma1);
        cfg.bath.params.omega2 = r.number("bath.omega2_au", cfg.bath.params.omega2);
        cfg.bath.params.gamma2 = r.number("bath.gamma2_au", cfg.bath.params.gamma2);
        cfg.bath.temperature_k = r.number("bath.temperature_k", 298.0);
        cfg.bath.n_matsubara = r.integer("bath.n_matsubara", -1);
        cfg.bath.coupling_scale = r.number("bath.coupling_scale", 0.125);
        if (cfg.bath_enabled) {
            try {
                cfg.bath.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("bath: ") + e.what());
            }
        }
    }

    // pulse
    {
        cfg.pulse.enabled = r.boolean("pulse.enabled", cfg.mode != RunMode::field_free);
        const bool has_e = r.has("pulse.energy_1e8ha");
        const bool has_a = r.has("pulse.amplitude_au");
        if (has_e && has_a)
            r.fail("pulse.amplitude_au",
                   "pulse.energy_1e8ha and pulse.amplitude_au are mutually exclusive parameterizations");
        cfg.pulse.energy_1e8ha = r.number("pulse.energy_1e8ha", 5.0);
        cfg.pulse.amplitude_au = r.number("pulse.amplitude_au", 0.0);
        cfg.pulse.explicit_amplitude = has_a;
        cfg.pulse.tau_ns = r.number("pulse.tau_ns", 50.0);
        const std::string carrier = r.token("pulse.carrier_ghz", "auto");
        if (carrier == "auto") cfg.pulse.carrier_ghz = 0.0;
        else {
            try {
                cfg.pulse.carrier_ghz = std::stod(carrier);
            } catch (const std::exception&) {
                r.fail("pulse.carrier_ghz", "expected a number or 'auto'");
            }
        }
        if (cfg.mode == RunMode::field_free) cfg.pulse.enabled = false;
        if (cfg.pulse.enabled) {
            if (!(cfg.pulse.tau_ns > 0.0)) r.fail("pulse.tau_ns", "must be positive");
            if (!cfg.pulse.explicit_amplitude && !(cfg.pulse.energy_1e8ha > 0.0))
                r.fail("pulse.energy_1e8ha", "must be positive");
        }
    }

    // emission rates; field_free reproduces the emission-free benchmark unless
    // rates are given explicitly
    {
        const double def = cfg.mode == RunMode::field_free ? 0.0 : 10.0;
        cfg.rates.g3_mhz = r.number("rates.g3_mhz", def);
        cfg.rates.g12_mhz = r.number("rates.g12_mhz", def);
        if (cfg.rates.g3_mhz < 0.0) r.fail("rates.g3_mhz", "must be >= 0");
        if (cfg.rates.g12_mhz < 0.0) r.fail("rates.g12_mhz", "must be >= 0");
    }

    cfg.initial_state = r.token("initial.state", cfg.mode == RunMode::field_free ? "B" : "ground");
    try {
        label_from_name(cfg.initial_state);
    } catch (const std::exception& e) {
        r.fail("initial.state", e.what());
    }

    // integrator + heom
    {
        cfg.integrator.rel_tol = r.number("integrator.rel_tol", 1e-7);
        cfg.integrator.abs_tol = r.number("integrator.abs_tol", 1e-10);
        cfg.integrator.initial_step_au = r.number("integrator.initial_step_au", 1e5);
        cfg.integrator.max_step_au = r.number("integrator.max_step_au", 0.0);
        cfg.integrator.t_final_ns = r.number("integrator.t_final_ns", 500.0);
        cfg.integrator.level = r.integer("integrator.level", -1);
        cfg.integrator.scaled_ados = r.boolean("integrator.scaled_ados", true);
        if (!(cfg.integrator.rel_tol > 0.0)) r.fail("integrator.rel_tol", "must be positive");
        if (!(cfg.integrator.abs_tol > 0.0)) r.fail("integrator.abs_tol", "must be positive");
        if (!(cfg.integrator.t_final_ns > 0.0)) r.fail("integrator.t_final_ns", "must be positive");
        if (cfg.integrator.level < -1) r.fail("integrator.level", "must be >= 0");

        cfg.heom.mode_cutoff = r.number("heom.mode_cutoff", 1e-12);
        const double ma = r.number("heom.max_ados", 2'000'000.0);
        if (!(ma > 0.0)) r.fail("heom.max_ados", "must be positive");
        cfg.heom.max_ados = static_cast<std::size_t>(ma);
        cfg.heom.rhs_threads = r.integer("heom.rhs_threads", 1);
        if (cfg.heom.rhs_threads < 1) r.fail("heom.rhs_threads", "must be >= 1");
    }

    cfg.grid_ns = r.number("observables.grid_ns", 0.5);
    if (!(cfg.grid_ns > 0.0)) r.fail("observables.grid_ns", "must be positive");

    // output
    cfg.output.dir = r.token("output.dir", "out");
    cfg.output.write_trajectory = r.boolean("output.write_trajectory", true);
    cfg.output.write_metadata = r.boolean("output.write_metadata", true);
    cfg.output.write_eigen_report = r.boolean("output.write_eigen_report", true);
    cfg.output.write_bath_expansion = r.boolean("output.write_bath_expansion", true);

    // scan + convergence
    cfg.scan.energies_1e8ha = r.number_list("scan.energies_1e8ha", cfg.scan.energies_1e8ha);
    cfg.scan.durations_ns = r.number_list("scan.durations_ns", cfg.scan.durations_ns);
    cfg.scan.threads = r.integer("scan.threads", 0);
    cfg.convergence.levels = r.int_list("convergence.levels", {});
    cfg.convergence.matsubara = r.int_list("convergence.matsubara", {});

    r.finish();
    return cfg;
}

// canonical echo of the resolved configuration; parse(echo(cfg)) == cfg
inline std::string echo_config(const RunConfig& cfg) {
    using detail::fmt_double;
    std::ostringstream o;
    auto num = [&](const std::string& k, double v) { o << k << " = " << fmt_double(v) << "\n"; };
    auto iv = [&](const std::string& k, long long v) { o << k << " = " << v << "\n"; };
    auto bv = [&](const std::string& k, bool v) { o << k << " = " << (v ? "true" : "false") << "\n"; };
    auto sv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
    auto lv = [&](const std::string& k, const std::vector<double>& v) {
        o << k << " = ";
        for (std::size_t i = 0; i < v.size(); ++i) o << (i ? ", " : "") << fmt_double(v[i]);
        o << "\n";
    };

    sv("mode", mode_name(cfg.mode));
    lv("network.omega_ghz", {cfg.network.omega_ghz[0], cfg.network.omega_ghz[1], cfg.network.omega_ghz[2]});
    {
        std::vector<double> j;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) j.push_back(cfg.network.coupling_ghz(i, k));
        lv("network.coupling_ghz", j);
    }
    {
        std::ostringstream s;
        for (std::size_t i = 0; i < cfg.network.dipole_sites.size(); ++i)
            s << (i ? ", " : "") << cfg.network.dipole_sites[i];
        sv("network.dipole_sites", s.str());
    }
    num("network.dipole_moment_au", cfg.network.dipole_moment_au);
    iv("network.noise_site", cfg.network.noise_site);
    bv("network.include_renormalization", cfg.renormalization);

    bv("bath.enabled", cfg.bath_enabled);
    if (cfg.bath.eta_target > 0.0) num("bath.eta_target", cfg.bath.eta_target);
    else num("bath.p_au", cfg.bath.params.p);
    num("bath.omega1_au", cfg.bath.params.omega1);
    num("bath.gamma1_au", cfg.bath.params.gamma1);
    num("bath.omega2_au", cfg.bath.params.omega2);
    num("bath.gamma2_au", cfg.bath.params.gamma2);
    num("bath.temperature_k", cfg.bath.temperature_k);
    iv("bath.n_matsubara", cfg.bath.n_matsubara);
    num("bath.coupling_scale", cfg.bath.coupling_scale);

    if (cfg.mode != RunMode::field_free) bv("pulse.enabled", cfg.pulse.enabled);
    if (cfg.pulse.explicit_amplitude) num("pulse.amplitude_au", cfg.pulse.amplitude_au);
    else num("pulse.energy_1e8ha", cfg.pulse.energy_1e8ha);
    num("pulse.tau_ns", cfg.pulse.tau_ns);
    if (cfg.pulse.carrier_ghz > 0.0) num("pulse.carrier_ghz", cfg.pulse.carrier_ghz);
    else sv("pulse.carrier_ghz", "auto");

    num("rates.g3_mhz", cfg.rates.g3_mhz);
    num("rates.g12_mhz", cfg.rates.g12_mhz);
    sv("initial.state", cfg.initial_state);

    num("integrator.rel_tol", cfg.integrator.rel_tol);
    num("integrator.abs_tol", cfg.integrator.abs_tol);
    num("integrator.initial_step_au", cfg.integrator.initial_step_au);
    num("integrator.max_step_au", cfg.integrator.max_step_au);
    num("integrator.t_final_ns", cfg.integrator.t_final_ns);
    iv("integrator.level", cfg.integrator.level);
    bv("integrator.scaled_ados", cfg.integrator.scaled_ados);

    num("heom.mode_cutoff", cfg.heom.mode_cutoff);
    iv("heom.max_ados", static_cast<long long>(cfg.heom.max_ados));
    iv("heom.rhs_threads", cfg.heom.rhs_threads);
    num("observables.grid_ns", cfg.grid_ns);

    sv("output.dir", cfg.output.dir);
    bv("output.write_trajectory", cfg.output.write_trajectory);
    bv("output.write_metadata", cfg.output.write_metadata);
    bv("output.write_eigen_report", cfg.output.write_eigen_report);
    bv("output.write_bath_expansion", cfg.output.write_bath_expansion);

    lv("scan.energies_1e8ha", cfg.scan.energies_1e8ha);
    lv("scan.durations_ns", cfg.scan.durations_ns);
    iv("scan.threads", cfg.scan.threads);
    if (!cfg.convergence.levels.empty()) {
        std::ostringstream s;
        for (std::size_t i = 0; i < cfg.convergence.levels.size(); ++i)
            s << (i ? ", " : "") << cfg.convergence.levels[i];
        sv("convergence.levels", s.str());
    }
    if (!cfg.convergence.matsubara.empty()) {
        std::ostringstream s;
        for (std::size_t i = 0; i < cfg.convergence.matsubara.size(); ++i)
            s << (i ? ", " : "") << cfg.convergence.matsubara[i];
        sv("convergence.matsubara", s.str());
    }
    return o.str();
}

// apply one "key=value" override on top of a config document
inline std::string apply_override(std::string text, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "': expected key=value");
    text += "\n# override\n";
    // later duplicate keys are rejected by the reader, so strip earlier lines
    const std::string key = kv.substr(0, eq);
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        std::string stripped = line;
        const auto hash = stripped.find('#');
        if (hash != std::string::npos) stripped.erase(hash);
        const auto e = stripped.find('=');
        bool drop = false;
        if (e != std::string::npos) {
            std::string k = stripped.substr(0, e);
            k.erase(0, k.find_first_not_of(" \t"));
            k.erase(k.find_last_not_of(" \t") + 1);
            std::string kk = key;
            kk.erase(0, kk.find_first_not_of(" \t"));
            kk.erase(kk.find_last_not_of(" \t") + 1);
            drop = (k == kk);
        }
        if (!drop) out += line + "\n";
    }
    out += kv + "\n";
    return out;
}

}  // namespace qnet
