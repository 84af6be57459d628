// run.hpp — run orchestration: resolve a configuration into model objects,
// execute the requested mode, and emit artifacts.
//
// Exit codes: 0 success, 2 configuration failure, 3 integration failure
// (scans with failed cells exit 3 with partial outputs preserved).
#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qnet/config.hpp"
#include "qnet/io.hpp"
#include "qnet/observables.hpp"

namespace qnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIntegration = 3;

struct ResolvedModel {
    SystemOperators ops;               // h_ren_shift filled when a bath is attached
    EigenStructure eig;
    SpectralDensityParams params;      // after optional eta_target rescaling
    BathExpansion expansion;           // empty terms when the bath is disabled
    double coupling_scale = 1.0;
    double lambda_eff = 0.0;           // reorganization energy of the attached coupling
    double carrier = 0.0;              // a.u. angular frequency
};

inline ResolvedModel resolve_model(const RunConfig& cfg) {
    ResolvedModel m;
    m.ops = build_operators(cfg.network);
    m.eig = eigenanalyze(m.ops);
    m.carrier = cfg.pulse.carrier_ghz > 0.0 ? units::ghz_to_au(cfg.pulse.carrier_ghz)
                                            : m.eig.carrier_gb();
    if (cfg.bath_enabled) {
        BathConfig bc = cfg.bath;
        m.params = resolved_params(bc, m.eig.gap_bd());
        bc.params = m.params;
        bc.eta_target = 0.0;
        m.expansion = expand_correlation(bc);
        m.coupling_scale = cfg.bath.coupling_scale;
        if (cfg.renormalization)
            m.lambda_eff = reorganization_energy(m.params) * m.coupling_scale;
        m.ops.h_ren_shift = m.lambda_eff;
    } else {
        m.expansion.n_cor = 0;
        m.expansion.temperature_k = cfg.bath.temperature_k;
        m.expansion.regime = cfg.bath.regime();
    }
    return m;
}

inline Mat8 initial_density(const RunConfig& cfg, const EigenStructure& eig) {
    Vec8r v;
    if (cfg.initial_state == "ground") {
        v = eig.vectors.col(0);  // exact ground state of H_S
    } else {
        v = eig.vector(label_from_name(cfg.initial_state));
    }
    const Vec8 vc = v.cast<cplx>();
    return vc * vc.adjoint();
}

inline Pulse resolve_pulse(const RunConfig& cfg, const ResolvedModel& m, double energy_au, double tau_au) {
    Pulse p;
    if (!cfg.pulse.enabled) return p;
    p.tau_max = tau_au;
    p.carrier = m.carrier;
    if (cfg.pulse.explicit_amplitude)
        p.amplitude = cfg.pulse.amplitude_au;
    else
        p.amplitude = amplitude_for_energy(energy_au, tau_au, m.carrier);
    if (!is_many_cycle(p.carrier, p.tau_max))
        std::cerr << "warning: pulse contains few carrier cycles (w*tau = " << p.carrier * p.tau_max
                  << "); the constant-energy normalization is exact but the pulse is not quasi-monochromatic\n";
    return p;
}

inline EmissionRates resolve_rates(const RunConfig& cfg) {
    return {units::mhz_rate_to_au(cfg.rates.g3_mhz), units::mhz_rate_to_au(cfg.rates.g12_mhz)};
}

inline HeomParams resolve_heom_params(const RunConfig& cfg, std::optional<int> level_override = {},
                                      int rhs_threads_override = 0) {
    HeomParams hp;
    hp.level = level_override.value_or(cfg.resolved_level());
    hp.scaled_ados = cfg.integrator.scaled_ados;
    hp.mode_cutoff = cfg.heom.mode_cutoff;
    hp.max_ados = cfg.heom.max_ados;
    hp.rhs_threads = rhs_threads_override > 0 ? rhs_threads_override : cfg.heom.rhs_threads;
    return hp;
}

inline IntegratorConfig resolve_integrator(const RunConfig& cfg) {
    IntegratorConfig ic;
    ic.rel_tol = cfg.integrator.rel_tol;
    ic.abs_tol = cfg.integrator.abs_tol;
    ic.initial_step_au = cfg.integrator.initial_step_au;
    ic.max_step_au = cfg.integrator.max_step_au;
    ic.t_final_au = units::ns_to_au(cfg.integrator.t_final_ns);
    return ic;
}

inline int env_threads() {
    if (const char* s = std::getenv("QNET_THREADS")) {
        const int n = std::atoi(s);
        if (n > 0) return n;
    }
    return 0;
}

inline int resolve_scan_threads(const RunConfig& cfg) {
    if (cfg.scan.threads > 0) return cfg.scan.threads;
    if (const int n = env_threads(); n > 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct TrajectoryOutcome {
    TrajectoryRecord record;
    RunMonitors monitors;
    std::size_t ado_count = 0;
    int n_modes = 0;
    int level = 0;
};

// One trajectory with optional overrides for convergence studies.
inline TrajectoryOutcome run_single(const RunConfig& cfg, std::optional<int> level_override = {},
                                    std::optional<int> matsubara_override = {},
                                    std::optional<bool> scaled_override = {}) {
    RunConfig c = cfg;
    if (matsubara_override) c.bath.n_matsubara = *matsubara_override;
    if (scaled_override) c.integrator.scaled_ados = *scaled_override;
    const ResolvedModel m = resolve_model(c);

    const Pulse pulse = resolve_pulse(c, m, units::e8ha_to_au(c.pulse.energy_1e8ha),
                                      units::ns_to_au(c.pulse.tau_ns));
    HeomParams hp = resolve_heom_params(c, level_override);
    if (!c.bath_enabled) hp.level = 0;
    HeomContext ctx(m.ops, m.expansion, m.coupling_scale, pulse, resolve_rates(c), hp);

    HierarchyState state = HierarchyState::from_system(ctx, initial_density(c, m.eig));
    TrajectoryOutcome out;
    out.ado_count = ctx.ado_count();
    out.n_modes = ctx.n_modes();
    out.level = hp.level;
    TrajectoryRecorder rec(m.eig, ctx, out.record);
    const IntegratorConfig ic = resolve_integrator(c);
    out.monitors = propagate(ctx, state, 0.0, ic.t_final_au, ic, units::ns_to_au(c.grid_ns), rec);
    return out;
}

namespace detail {

inline nlohmann::json metadata_json(const RunConfig& cfg, const ResolvedModel& m) {
    nlohmann::json j;
    j["resolved_config"] = echo_config(cfg);
    j["mode"] = mode_name(cfg.mode);
    j["carrier_ghz"] = units::au_to_ghz(m.carrier);
    j["gap_gB_ghz"] = units::au_to_ghz(m.eig.carrier_gb());
    j["gap_BD_ghz"] = units::au_to_ghz(m.eig.gap_bd());
    j["bath_enabled"] = cfg.bath_enabled;
    if (cfg.bath_enabled) {
        j["p_au_resolved"] = m.params.p;
        j["lambda_eff_au"] = m.lambda_eff;
        j["eta_of_table_J"] = reorganization_energy(m.params) / m.eig.gap_bd();
        j["coupling_scale"] = m.coupling_scale;
        j["n_cor"] = m.expansion.n_cor;
        j["n_matsubara"] = m.expansion.n_matsubara;
        j["regime"] = m.expansion.regime == BathRegime::classical ? "classical" : "quantum";
    }
    j["level"] = cfg.bath_enabled ? cfg.resolved_level() : 0;
    j["rel_tol"] = cfg.integrator.rel_tol;
    j["abs_tol"] = cfg.integrator.abs_tol;
    return j;
}

inline void add_monitor_json(nlohmann::json& j, const RunMonitors& mon, std::size_t ados) {
    j["monitors"]["max_trace_dev"] = mon.max_trace_dev;
    j["monitors"]["max_herm_dev"] = mon.max_herm_dev;
    j["monitors"]["min_rho_eigenvalue"] = mon.min_rho_eigenvalue;
    j["monitors"]["n_steps"] = mon.steps.n_steps;
    j["monitors"]["n_rejected"] = mon.steps.n_rejected;
    j["ado_count"] = ados;
}

}  // namespace detail

// Scan driver shared by run() and the acceptance suite.
inline ScanResult run_scan_cells(const RunConfig& cfg, const ResolvedModel& m, int threads) {
    auto cell = [&](double energy_au, double tau_au) -> CellOutcome {
        RunConfig c = cfg;
        const Pulse pulse = [&] {
            Pulse p;
            p.tau_max = tau_au;
            p.carrier = m.carrier;
            p.amplitude = amplitude_for_energy(energy_au, tau_au, m.carrier);
            return p;
        }();
        HeomParams hp = resolve_heom_params(c);
        if (!c.bath_enabled) hp.level = 0;
        HeomContext ctx(m.ops, m.expansion, m.coupling_scale, pulse, resolve_rates(c), hp);
        HierarchyState state = HierarchyState::from_system(ctx, initial_density(c, m.eig));

        // lightweight sampler: only the flux integrals are needed per cell
        double p_res = 0.0, p_loss = 0.0, t_prev = 0.0, fr_prev = 0.0, fl_prev = 0.0;
        bool first = true;
        const IntegratorConfig ic = resolve_integrator(c);
        propagate(ctx, state, 0.0, ic.t_final_au, ic, units::ns_to_au(c.grid_ns),
                  [&](double t, const Mat8& rho) {
                      const double fr = ctx.flux_res(rho), fl = ctx.flux_loss(rho);
                      if (!first) {
                          p_res += 0.5 * (t - t_prev) * (fr_prev + fr);
                          p_loss += 0.5 * (t - t_prev) * (fl_prev + fl);
                      }
                      first = false;
                      t_prev = t;
                      fr_prev = fr;
                      fl_prev = fl;
                  });
        return {p_res, p_loss};
    };
    return scan_grid(cfg.scan.energies_1e8ha, cfg.scan.durations_ns, cell, threads);
}

struct ConvergenceRow {
    int level = 0;
    int n_matsubara = 0;
    double p_res = 0.0, p_loss = 0.0, r = 0.0;
    double max_delta_prev = 0.0;  // max abs observable difference vs previous row
};

inline double max_observable_delta(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    const std::size_t n = std::min(a.size(), b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 8; ++c)
            d = std::max(d, std::abs(a.eig_populations[i][c] - b.eig_populations[i][c]));
        d = std::max(d, std::abs(std::abs(a.coh_dm_dp[i]) - std::abs(b.coh_dm_dp[i])));
        d = std::max(d, std::abs(std::abs(a.coh_bem_bep[i]) - std::abs(b.coh_bem_bep[i])));
    }
    return d;
}

inline std::vector<ConvergenceRow> run_convergence_rows(const RunConfig& cfg,
                                                        std::vector<TrajectoryRecord>* records = nullptr) {
    std::vector<int> levels = cfg.convergence.levels;
    if (levels.empty()) levels = {cfg.resolved_level(), cfg.resolved_level() + 1};
    std::vector<int> mats = cfg.convergence.matsubara;
    if (mats.empty()) mats = {cfg.bath.resolved_matsubara()};

    std::vector<ConvergenceRow> rows;
    TrajectoryRecord prev;
    bool have_prev = false;
    for (int nm : mats) {
        for (int lv : levels) {
            TrajectoryOutcome out = run_single(cfg, lv, nm);
            ConvergenceRow row;
            row.level = lv;
            row.n_matsubara = nm;
            row.p_res = out.record.final_p_res();
            row.p_loss = out.record.final_p_loss();
            row.r = (row.p_res + row.p_loss) > 0.0 ? row.p_res / (row.p_res + row.p_loss) : 0.0;
            if (have_prev) row.max_delta_prev = max_observable_delta(prev, out.record);
            prev = out.record;
            have_prev = true;
            if (records) records->push_back(std::move(out.record));
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    using detail::csv_num;
    std::string out = "level,n_matsubara,P_res,P_loss,R,max_delta_vs_prev\n";
    for (const auto& r : rows)
        out += std::to_string(r.level) + "," + std::to_string(r.n_matsubara) + "," + csv_num(r.p_res) +
               "," + csv_num(r.p_loss) + "," + csv_num(r.r) + "," + csv_num(r.max_delta_prev) + "\n";
    return out;
}

// Execute a fully parsed configuration; writes artifacts under out_dir.
inline int run(const RunConfig& cfg, const std::string& out_dir_override = "") {
    namespace fs = std::filesystem;
    const fs::path dir = out_dir_override.empty() ? fs::path(cfg.output.dir) : fs::path(out_dir_override);
    fs::create_directories(dir);

    ResolvedModel m;
    try {
        m = resolve_model(cfg);
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    nlohmann::json meta = detail::metadata_json(cfg, m);
    if (cfg.output.write_eigen_report) detail::write_file(dir / "eigen.json", eigen_report(m.eig).dump(2));
    if (cfg.output.write_bath_expansion && cfg.bath_enabled)
        detail::write_file(dir / "bath_expansion.json", bath_report(m.expansion).dump(2));

    try {
        switch (cfg.mode) {
            case RunMode::trajectory:
            case RunMode::field_free: {
                TrajectoryOutcome out = run_single(cfg);
                if (cfg.output.write_trajectory)
                    detail::write_file(dir / "trajectory.csv", trajectory_csv(out.record));
                detail::add_monitor_json(meta, out.monitors, out.ado_count);
                if (out.record.final_p_res() + out.record.final_p_loss() > 0.0)
                    meta["R"] = efficiency_ratio(out.record.final_p_res(), out.record.final_p_loss());
                meta["P_res"] = out.record.final_p_res();
                meta["P_loss"] = out.record.final_p_loss();
                break;
            }
            case RunMode::scan: {
                const ScanResult sr = run_scan_cells(cfg, m, resolve_scan_threads(cfg));
                detail::write_file(dir / "scan.csv", scan_csv(sr));
                bool any_failed = false;
                for (const auto& c : sr.cells) any_failed |= (c.status != "ok");
                meta["scan_cells"] = sr.cells.size();
                if (cfg.output.write_metadata) detail::write_file(dir / "metadata.json", meta.dump(2));
                if (any_failed) {
                    std::cerr << "scan finished with failed cells (see scan.csv)\n";
                    return kExitIntegration;
                }
                return kExitOk;
            }
            case RunMode::convergence: {
                const auto rows = run_convergence_rows(cfg);
                detail::write_file(dir / "convergence.csv", convergence_csv(rows));
                break;
            }
        }
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << "\n";
        if (cfg.output.write_metadata) {
            meta["error"] = e.what();
            detail::write_file(dir / "metadata.json", meta.dump(2));
        }
        return kExitIntegration;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIntegration;
    }

    if (cfg.output.write_metadata) detail::write_file(dir / "metadata.json", meta.dump(2));
    return kExitOk;
}

}  // namespace qnet
