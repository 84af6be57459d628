// network.hpp — three-qubit system operators, eigenanalysis, bright/dark labels.
//
// Site basis |n1 n2 n3>, n_i in {0,1}, basis index = 4*n1 + 2*n2 + n3.
// sigma_z |1> = +|1>, so S = sigma_z^(2) + 1 has diagonal entries {0,2} and
// selects the excited state of Q2. All operators of this model are real in
// the site basis; they are stored as real matrices.
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/types.hpp"
#include "qnet/units.hpp"

namespace qnet {

struct NetworkSpec {
    std::array<double, 3> omega_ghz{12.0, 12.0, 11.5};  // qubit frequencies nu_i
    Eigen::Matrix3d coupling_ghz = default_coupling();  // J_ij, symmetric, zero diagonal
    std::vector<int> dipole_sites{1, 2};                // 1-based site indices driven by the field
    double dipole_moment_au = 1.0;                      // mu per qubit
    int noise_site = 2;                                 // 1-based site coupled to the bath

    static Eigen::Matrix3d default_coupling() {
        Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
        j(0, 1) = j(1, 0) = 0.5;
        j(1, 2) = j(2, 1) = 0.05;
        return j;
    }

    void validate() const {
        for (double w : omega_ghz)
            if (!(w > 0.0)) throw std::invalid_argument("NetworkSpec: qubit frequencies must be positive");
        for (int i = 0; i < 3; ++i) {
            if (coupling_ghz(i, i) != 0.0)
                throw std::invalid_argument("NetworkSpec: coupling matrix must have zero diagonal");
            for (int j = i + 1; j < 3; ++j)
                if (coupling_ghz(i, j) != coupling_ghz(j, i))
                    throw std::invalid_argument(
                        "NetworkSpec: coupling matrix not symmetric at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ")");
        }
        if (noise_site < 1 || noise_site > 3)
            throw std::invalid_argument("NetworkSpec: noise_site must be 1, 2 or 3");
        if (dipole_sites.empty()) throw std::invalid_argument("NetworkSpec: dipole_sites must not be empty");
        for (int s : dipole_sites)
            if (s < 1 || s > 3) throw std::invalid_argument("NetworkSpec: dipole_sites entries must be 1..3");
    }
};

namespace detail {

inline Mat8r embed(const Mat2r& op, int site) {  // site 0..2
    Mat8r out = Mat8r::Zero();
    for (int a = 0; a < kDim; ++a) {
        const int na[3] = {(a >> 2) & 1, (a >> 1) & 1, a & 1};
        for (int b = 0; b < kDim; ++b) {
            const int nb[3] = {(b >> 2) & 1, (b >> 1) & 1, b & 1};
            bool same = true;
            for (int s = 0; s < 3; ++s)
                if (s != site && na[s] != nb[s]) { same = false; break; }
            if (same) out(a, b) = op(na[site], nb[site]);
        }
    }
    return out;
}

inline Mat2r sigma_z() { Mat2r m; m << -1, 0, 0, 1; return m; }
inline Mat2r sigma_minus() { Mat2r m; m << 0, 1, 0, 0; return m; }  // |0><1|
inline Mat2r sigma_plus() { return sigma_minus().transpose().eval(); }
inline Mat2r sigma_x() { Mat2r m; m << 0, 1, 1, 0; return m; }

}  // namespace detail

struct SystemOperators {
    Mat8r h_system = Mat8r::Zero();   // a.u. angular frequency
    Mat8r s_coupling = Mat8r::Zero(); // sigma_z^(noise_site) + 1, eigenvalues {0,2}
    Mat8r dipole = Mat8r::Zero();     // mu * sum_{i in dipole_sites} sigma_x^(i)
    Mat8r lower_res = Mat8r::Zero();  // d_-(3)
    Mat8r lower_guide = Mat8r::Zero();// d_-(12) = d_-1 + d_-2
    Mat8r number_op = Mat8r::Zero();  // total excitation number
    double h_ren_shift = 0.0;         // lambda; set when a bath is attached

    Vec8r s_diagonal() const { return s_coupling.diagonal(); }
};

inline SystemOperators build_operators(const NetworkSpec& spec) {
    using namespace detail;
    spec.validate();
    SystemOperators ops;
    for (int i = 0; i < 3; ++i)
        ops.h_system += 0.5 * units::ghz_to_au(spec.omega_ghz[i]) * embed(sigma_z(), i);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (spec.coupling_ghz(i, j) != 0.0)
                ops.h_system += units::ghz_to_au(spec.coupling_ghz(i, j)) *
                                (embed(sigma_plus(), i) * embed(sigma_minus(), j) +
                                 embed(sigma_plus(), j) * embed(sigma_minus(), i));

    ops.s_coupling = embed(sigma_z(), spec.noise_site - 1) + Mat8r::Identity();
    for (int s : spec.dipole_sites) ops.dipole += spec.dipole_moment_au * embed(sigma_x(), s - 1);
    ops.lower_res = embed(sigma_minus(), 2);
    ops.lower_guide = embed(sigma_minus(), 0) + embed(sigma_minus(), 1);
    for (int i = 0; i < 3; ++i) ops.number_op += 0.5 * (embed(sigma_z(), i) + Mat8r::Identity());
    return ops;
}

// Eigenstate labels of the default level structure.
enum class StateLabel { g, Dm, Dp, B, De, Bem, Bep, top };

inline const std::array<StateLabel, 8>& all_labels() {
    static const std::array<StateLabel, 8> v{StateLabel::g,  StateLabel::Dm,  StateLabel::Dp, StateLabel::B,
                                             StateLabel::De, StateLabel::Bem, StateLabel::Bep, StateLabel::top};
    return v;
}

inline std::string label_name(StateLabel l) {
    switch (l) {
        case StateLabel::g:   return "g";
        case StateLabel::Dm:  return "D-";
        case StateLabel::Dp:  return "D+";
        case StateLabel::B:   return "B";
        case StateLabel::De:  return "De";
        case StateLabel::Bem: return "Be-";
        case StateLabel::Bep: return "Be+";
        case StateLabel::top: return "top";
    }
    return "?";
}

inline StateLabel label_from_name(const std::string& s) {
    for (StateLabel l : all_labels())
        if (label_name(l) == s) return l;
    if (s == "ground") return StateLabel::g;
    throw std::invalid_argument("unknown state label '" + s + "'");
}

struct EigenStructure {
    Vec8r energies;                   // ascending, a.u. angular frequency
    Mat8r vectors;                    // columns, site basis, sign-fixed
    std::array<int, 8> sector{};      // excitation number per eigenstate
    std::map<StateLabel, int> labels; // label -> eigenindex
    Mat8r dipole_table;               // |<i| dipole |j>| in the eigenbasis

    int index(StateLabel l) const { return labels.at(l); }
    double energy(StateLabel l) const { return energies(index(l)); }
    Vec8r vector(StateLabel l) const { return vectors.col(index(l)); }
    // g->B gap, the default drive carrier
    double carrier_gb() const { return energy(StateLabel::B) - energy(StateLabel::g); }
    // doublet-center B-D gap used for the eta calibration
    double gap_bd() const {
        return energy(StateLabel::B) - 0.5 * (energy(StateLabel::Dm) + energy(StateLabel::Dp));
    }
};

// Bright/dark classification threshold on dipole matrix elements (a.u.).
inline constexpr double kBrightThreshold = 0.3;

inline EigenStructure eigenanalyze(const SystemOperators& ops) {
    if ((ops.h_system - ops.h_system.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("eigenanalyze: h_system is not symmetric");

    Eigen::SelfAdjointEigenSolver<Mat8r> solver(ops.h_system);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenanalyze: diagonalization failed");

    EigenStructure eig;
    eig.energies = solver.eigenvalues();
    eig.vectors = solver.eigenvectors();

    // sign convention: largest-magnitude component real positive (lowest index on ties)
    for (int c = 0; c < kDim; ++c) {
        int kmax = 0;
        for (int r = 1; r < kDim; ++r)
            if (std::abs(eig.vectors(r, c)) > std::abs(eig.vectors(kmax, c)) + 1e-14) kmax = r;
        if (eig.vectors(kmax, c) < 0.0) eig.vectors.col(c) *= -1.0;
    }

    // sectors via number-operator expectation, never energy windows
    for (int c = 0; c < kDim; ++c) {
        const double n = eig.vectors.col(c).dot(ops.number_op * eig.vectors.col(c));
        eig.sector[c] = static_cast<int>(std::lround(n));
    }
    std::array<int, 4> count{};
    for (int c = 0; c < kDim; ++c) {
        if (eig.sector[c] < 0 || eig.sector[c] > 3)
            throw std::runtime_error("eigenanalyze: unexpected excitation sector");
        ++count[eig.sector[c]];
    }
    if (count != std::array<int, 4>{1, 3, 3, 1})
        throw std::runtime_error("eigenanalyze: sector sizes are not {1,3,3,1}");

    eig.dipole_table = (eig.vectors.transpose() * ops.dipole * eig.vectors).cwiseAbs();

    // labels: within each excited sector, bright states have a large dipole
    // element to the sector below
    std::vector<int> s1, s2;
    int ig = -1, itop = -1;
    for (int c = 0; c < kDim; ++c) {
        if (eig.sector[c] == 0) ig = c;
        if (eig.sector[c] == 3) itop = c;
        if (eig.sector[c] == 1) s1.push_back(c);
        if (eig.sector[c] == 2) s2.push_back(c);
    }
    auto max_dip_to = [&](int c, const std::vector<int>& below) {
        double m = 0.0;
        for (int b : below) m = std::max(m, eig.dipole_table(c, b));
        return m;
    };
    std::vector<int> bright1, dark1, bright2, dark2;
    for (int c : s1) (max_dip_to(c, {ig}) > kBrightThreshold ? bright1 : dark1).push_back(c);
    for (int c : s2) (max_dip_to(c, s1) > kBrightThreshold ? bright2 : dark2).push_back(c);
    if (bright1.size() != 1 || dark1.size() != 2)
        throw std::runtime_error("eigenanalyze: one-excitation sector is not 1 bright + 2 dark");
    if (bright2.size() != 2 || dark2.size() != 1)
        throw std::runtime_error("eigenanalyze: two-excitation sector is not 2 bright + 1 dark");

    eig.labels[StateLabel::g] = ig;
    eig.labels[StateLabel::top] = itop;
    eig.labels[StateLabel::B] = bright1[0];
    eig.labels[StateLabel::Dm] = dark1[0];  // eigenvalues already ascending
    eig.labels[StateLabel::Dp] = dark1[1];
    eig.labels[StateLabel::De] = dark2[0];
    eig.labels[StateLabel::Bem] = bright2[0];
    eig.labels[StateLabel::Bep] = bright2[1];
    return eig;
}

inline double transition_dipole(const EigenStructure& eig, StateLabel i, StateLabel j) {
    return eig.dipole_table(eig.index(i), eig.index(j));
}

}  // namespace qnet
