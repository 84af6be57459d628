// io.hpp — CSV and JSON artifacts: trajectory and scan tables, eigenstructure
// and bath-expansion reports, metadata sidecars, hierarchy checkpoints.
// CSV: '.' decimal separator, fixed column order, deterministic formatting.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnet/bath.hpp"
#include "qnet/config.hpp"
#include "qnet/heom.hpp"
#include "qnet/network.hpp"
#include "qnet/observables.hpp"
#include "qnet/units.hpp"

namespace qnet {

namespace detail {

inline std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline std::string trajectory_csv(const TrajectoryRecord& tr) {
    using detail::csv_num;
    std::string out =
        "t_ns,pop_g,pop_Dm,pop_Dp,pop_B,pop_De,pop_Bem,pop_Bep,abs_coh_DmDp,abs_coh_BemBep,"
        "pop_Q3,flux_res,flux_loss,P_res,P_loss\n";
    for (std::size_t i = 0; i < tr.size(); ++i) {
        out += csv_num(tr.times_ns[i]);
        for (double p : tr.eig_populations[i]) out += "," + csv_num(p);
        out += "," + csv_num(std::abs(tr.coh_dm_dp[i]));
        out += "," + csv_num(std::abs(tr.coh_bem_bep[i]));
        out += "," + csv_num(tr.site3_population[i]);
        out += "," + csv_num(tr.flux_res[i]);
        out += "," + csv_num(tr.flux_loss[i]);
        out += "," + csv_num(tr.p_res[i]);
        out += "," + csv_num(tr.p_loss[i]);
        out += "\n";
    }
    return out;
}

inline std::string scan_csv(const ScanResult& sr) {
    using detail::csv_num;
    std::string out = "E_1e8Ha,tau_ns,R,P_res,P_loss,status\n";
    for (const ScanCell& c : sr.cells) {
        out += csv_num(c.energy_1e8ha) + "," + csv_num(c.tau_ns) + "," + csv_num(c.r) + "," +
               csv_num(c.p_res) + "," + csv_num(c.p_loss) + ",";
        // RFC-4180 quoting for the status field (may contain commas)
        if (c.status.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char ch : c.status) q += (ch == '"') ? "\"\"" : std::string(1, ch);
            out += q + "\"";
        } else {
            out += c.status;
        }
        out += "\n";
    }
    return out;
}

inline nlohmann::json eigen_report(const EigenStructure& eig) {
    nlohmann::json j;
    for (int i = 0; i < kDim; ++i) j["energies_ghz"].push_back(units::au_to_ghz(eig.energies(i)));
    for (StateLabel l : all_labels()) j["labels"][label_name(l)] = eig.index(l);
    for (int c = 0; c < kDim; ++c) {
        nlohmann::json col = nlohmann::json::array();
        for (int r = 0; r < kDim; ++r) col.push_back(eig.vectors(r, c));
        j["vectors"].push_back(col);
    }
    for (int r = 0; r < kDim; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < kDim; ++c) row.push_back(eig.dipole_table(r, c));
        j["dipole_table"].push_back(row);
    }
    j["gap_gB_ghz"] = units::au_to_ghz(eig.carrier_gb());
    j["gap_BD_ghz"] = units::au_to_ghz(eig.gap_bd());
    return j;
}

inline nlohmann::json bath_report(const BathExpansion& ex) {
    nlohmann::json j;
    j["n_cor"] = ex.n_cor;
    j["temperature_k"] = ex.temperature_k;
    j["n_matsubara"] = ex.n_matsubara;
    j["regime"] = ex.regime == BathRegime::classical ? "classical" : "quantum";
    for (const auto& t : ex.terms) {
        nlohmann::json term;
        term["alpha"] = {t.alpha.real(), t.alpha.imag()};
        term["alpha_tilde"] = {t.alpha_tilde.real(), t.alpha_tilde.imag()};
        term["gamma"] = {t.gamma.real(), t.gamma.imag()};
        j["terms"].push_back(term);
    }
    return j;
}

// ---- checkpoints -----------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json checkpoint_json(const HeomContext& ctx, const HierarchyState& state, double t_au) {
    nlohmann::json j;
    j["version"] = kCheckpointVersion;
    j["index_order"] = "graded-lex";
    j["n_cor"] = ctx.n_modes();
    j["level"] = ctx.params().level;
    j["scaled_ados"] = ctx.params().scaled_ados;
    j["ado_count"] = ctx.ado_count();
    j["t_au"] = t_au;
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < state.data.size(); ++i)
        data.push_back({state.data(i).real(), state.data(i).imag()});
    j["data"] = std::move(data);
    return j;
}

inline void save_checkpoint(const std::filesystem::path& path, const HeomContext& ctx,
                            const HierarchyState& state, double t_au) {
    detail::write_file(path, checkpoint_json(ctx, state, t_au).dump());
}

inline std::pair<HierarchyState, double> load_checkpoint(const std::filesystem::path& path,
                                                         const HeomContext& ctx) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
    nlohmann::json j;
    in >> j;
    if (j.at("version").get<int>() != kCheckpointVersion)
        throw std::runtime_error("checkpoint version mismatch");
    if (j.at("n_cor").get<int>() != ctx.n_modes() || j.at("level").get<int>() != ctx.params().level ||
        j.at("scaled_ados").get<bool>() != ctx.params().scaled_ados ||
        j.at("ado_count").get<std::size_t>() != ctx.ado_count() ||
        j.at("index_order").get<std::string>() != "graded-lex")
        throw std::runtime_error("checkpoint is incompatible with this hierarchy");
    HierarchyState s = HierarchyState::zero(ctx);
    const auto& data = j.at("data");
    if (data.size() != static_cast<std::size_t>(s.data.size()))
        throw std::runtime_error("checkpoint data size mismatch");
    for (std::size_t i = 0; i < data.size(); ++i)
        s.data(static_cast<Eigen::Index>(i)) = cplx(data[i][0].get<double>(), data[i][1].get<double>());
    return {std::move(s), j.at("t_au").get<double>()};
}

}  // namespace qnet
