// observables.hpp — eigenbasis projections, emission fluxes, the efficiency
// ratio R, and the (energy, duration) scan orchestration.
#pragma once

#include <atomic>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qnet/heom.hpp"
#include "qnet/network.hpp"
#include "qnet/types.hpp"
#include "qnet/units.hpp"

namespace qnet {

inline Mat8 to_eigenbasis(const Mat8& rho, const EigenStructure& eig) {
    const Mat8 v = eig.vectors.cast<cplx>();
    return v.adjoint() * rho * v;
}

inline Vec8r eigen_populations(const Mat8& rho, const EigenStructure& eig) {
    return to_eigenbasis(rho, eig).diagonal().real();
}

// excited-state population of Q3, diagonal in the site basis
inline double site3_population(const Mat8& rho) {
    double p = 0.0;
    for (int m = 0; m < kDim; ++m)
        if (m & 1) p += rho(m, m).real();
    return p;
}

struct TrajectoryRecord {
    std::vector<double> times_ns;
    // populations ordered as all_labels(): g, D-, D+, B, De, Be-, Be+, top
    std::vector<std::array<double, 8>> eig_populations;
    std::vector<cplx> coh_dm_dp;
    std::vector<cplx> coh_bem_bep;
    std::vector<double> site3_population;
    std::vector<double> flux_res, flux_loss;  // instantaneous emitted-quanta rates, 1/a.u.
    std::vector<double> p_res, p_loss;        // cumulative trapezoid integrals

    double final_p_res() const { return p_res.empty() ? 0.0 : p_res.back(); }
    double final_p_loss() const { return p_loss.empty() ? 0.0 : p_loss.back(); }
    std::size_t size() const { return times_ns.size(); }
};

inline double efficiency_ratio(double p_res, double p_loss) {
    const double tot = p_res + p_loss;
    if (!(tot > 0.0)) throw std::domain_error("efficiency_ratio: undefined, no emission occurred");
    return p_res / tot;
}

// Sampler that assembles a TrajectoryRecord during propagation.
class TrajectoryRecorder {
public:
    TrajectoryRecorder(const EigenStructure& eig, const HeomContext& ctx, TrajectoryRecord& out)
        : eig_(eig), ctx_(ctx), out_(out) {}

    void operator()(double t_au, const Mat8& rho) {
        const Mat8 re = to_eigenbasis(rho, eig_);
        std::array<double, 8> pops{};
        int li = 0;
        for (StateLabel l : all_labels()) pops[li++] = re(eig_.index(l), eig_.index(l)).real();

        const double fr = ctx_.flux_res(rho);
        const double fl = ctx_.flux_loss(rho);
        double pr = 0.0, pl = 0.0;
        if (!out_.times_ns.empty()) {
            const double dt = t_au - units::ns_to_au(out_.times_ns.back());
            pr = out_.p_res.back() + 0.5 * dt * (out_.flux_res.back() + fr);
            pl = out_.p_loss.back() + 0.5 * dt * (out_.flux_loss.back() + fl);
        }
        out_.times_ns.push_back(units::au_to_ns(t_au));
        out_.eig_populations.push_back(pops);
        out_.coh_dm_dp.push_back(re(eig_.index(StateLabel::Dm), eig_.index(StateLabel::Dp)));
        out_.coh_bem_bep.push_back(re(eig_.index(StateLabel::Bem), eig_.index(StateLabel::Bep)));
        out_.site3_population.push_back(site3_population(rho));
        out_.flux_res.push_back(fr);
        out_.flux_loss.push_back(fl);
        out_.p_res.push_back(pr);
        out_.p_loss.push_back(pl);
    }

private:
    const EigenStructure& eig_;
    const HeomContext& ctx_;
    TrajectoryRecord& out_;
};

struct ScanCell {
    double energy_1e8ha = 0.0;
    double tau_ns = 0.0;
    double p_res = 0.0, p_loss = 0.0, r = 0.0;
    std::string status = "ok";  // "ok" or "failed: <reason>"
};

struct ScanResult {
    std::vector<double> energies_1e8ha;
    std::vector<double> durations_ns;
    std::vector<ScanCell> cells;  // row-major over (energy, duration)

    const ScanCell& at(std::size_t ie, std::size_t id) const { return cells[ie * durations_ns.size() + id]; }
};

struct CellOutcome {
    double p_res = 0.0, p_loss = 0.0;
};

// One full trajectory per cell; cells are independent and run on n_threads
// workers with deterministic per-cell results.
inline ScanResult scan_grid(const std::vector<double>& energies_1e8ha, const std::vector<double>& durations_ns,
                            const std::function<CellOutcome(double energy_au, double tau_au)>& run_cell,
                            int n_threads = 1) {
    if (energies_1e8ha.empty() || durations_ns.empty())
        throw std::invalid_argument("scan_grid: empty grid");
    ScanResult res;
    res.energies_1e8ha = energies_1e8ha;
    res.durations_ns = durations_ns;
    res.cells.resize(energies_1e8ha.size() * durations_ns.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= res.cells.size()) return;
            const std::size_t ie = idx / durations_ns.size();
            const std::size_t id = idx % durations_ns.size();
            ScanCell& cell = res.cells[idx];
            cell.energy_1e8ha = energies_1e8ha[ie];
            cell.tau_ns = durations_ns[id];
            try {
                const CellOutcome out =
                    run_cell(units::e8ha_to_au(cell.energy_1e8ha), units::ns_to_au(cell.tau_ns));
                cell.p_res = out.p_res;
                cell.p_loss = out.p_loss;
                cell.r = efficiency_ratio(out.p_res, out.p_loss);
            } catch (const std::exception& e) {
                cell.status = std::string("failed: ") + e.what();
            }
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return res;
}

}  // namespace qnet
