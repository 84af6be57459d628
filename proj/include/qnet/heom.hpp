// heom.hpp — hierarchy context, the HEOM right-hand side, Lindblad emission,
// and the adaptive propagation driver.
//
// Equation of motion per auxiliary operator rho_n:
//   d/dt rho_n = -i[H_S + H_f(t) + H_ren, rho_n] + i sum_k n_k gamma_k rho_n
//                - i[S, sum_k rho_{n_k^+}]
//                - i sum_k n_k (alpha_k S rho_{n_k^-} - alpha~_k rho_{n_k^-} S)
//                + delta_{n,0} (L3[rho] + L12[rho])
// with Im(gamma_k) > 0 damping the hierarchy. Couplings above the truncation
// level are dropped. S is diagonal in the site basis, so the S-products are
// row/column scalings and the [S, .] commutator is an elementwise mask.
// ADOs are stored scaled by 1/sqrt(prod_k n_k! b_k^{n_k}), b_k = |alpha_k|,
// unless scaled_ados is off.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qnet/bath.hpp"
#include "qnet/cash_karp.hpp"
#include "qnet/driving.hpp"
#include "qnet/hierarchy.hpp"
#include "qnet/network.hpp"
#include "qnet/types.hpp"

namespace qnet {

enum class Channel { resonator, waveguide };

struct EmissionRates {
    double g3 = 0.0;   // a.u.
    double g12 = 0.0;  // a.u.
};

// (G/2) * (2 d rho d+ - d+ d rho - rho d+ d) for one emission channel
inline Mat8 lindblad_term(const SystemOperators& ops, const Mat8& rho, Channel ch, double rate) {
    const Mat8r& d = (ch == Channel::resonator) ? ops.lower_res : ops.lower_guide;
    const Mat8r dd = d.transpose() * d;
    Mat8 out = 2.0 * (d * rho * d.transpose());
    out -= dd * rho;
    out -= rho * dd;
    return 0.5 * rate * out;
}

struct HeomParams {
    int level = 4;
    bool scaled_ados = true;
    double mode_cutoff = 1e-12;   // relative weight below which a mode spawns no
                                  // hierarchy dimension (0 disables pruning)
    std::size_t max_ados = 2'000'000;
    int rhs_threads = 1;
};

class HeomContext {
public:
    HeomContext(const SystemOperators& ops, const BathExpansion& bath, double coupling_scale,
                const Pulse& pulse, EmissionRates rates, const HeomParams& prm)
        : ops_(ops), pulse_(pulse), rates_(rates), prm_(prm) {
        // effective modes: coupling prefactor applied, negligible modes pruned
        double wmax = 0.0;
        for (const auto& m : bath.terms) wmax = std::max(wmax, std::abs(m.alpha) + std::abs(m.alpha_tilde));
        for (const auto& m : bath.terms) {
            const double w = std::abs(m.alpha) + std::abs(m.alpha_tilde);
            if (wmax > 0.0 && w < prm.mode_cutoff * wmax) continue;
            modes_.push_back({m.alpha * coupling_scale, m.alpha_tilde * coupling_scale, m.gamma});
        }
        hier_ = enumerate_hierarchy(static_cast<int>(modes_.size()), prm.level, prm.max_ados);
        build_tables();

        h0_ = ops.h_system.cast<cplx>();
        if (ops.h_ren_shift != 0.0)  // H_ren = lambda S^2 = 2 lambda S for S with eigenvalues {0,2}
            h0_ += (ops.h_ren_shift * ops.s_coupling * ops.s_coupling).cast<cplx>();
        dip_ = ops.dipole.cast<cplx>();

        const Vec8r s = ops.s_diagonal();
        if ((ops.s_coupling - Mat8r(s.asDiagonal())).cwiseAbs().maxCoeff() > 1e-14)
            throw std::invalid_argument("HeomContext: s_coupling must be diagonal in the site basis");
        svec_ = s.cast<cplx>();
        for (int r = 0; r < kDim; ++r)
            for (int c = 0; c < kDim; ++c) mi_smask_(r, c) = cplx(0.0, -(s(r) - s(c)));

        d3_ = ops.lower_res.cast<cplx>();
        d12_ = ops.lower_guide.cast<cplx>();
        n3_ = (ops.lower_res.transpose() * ops.lower_res).cast<cplx>();
        n12_ = (ops.lower_guide.transpose() * ops.lower_guide).cast<cplx>();
    }

    std::size_t ado_count() const { return hier_.size(); }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(ado_count()) * kDim * kDim; }
    int n_modes() const { return static_cast<int>(modes_.size()); }
    const Hierarchy& hierarchy() const { return hier_; }
    const std::vector<BathTerm>& modes() const { return modes_; }
    const SystemOperators& ops() const { return ops_; }
    const Pulse& pulse() const { return pulse_; }
    const EmissionRates& rates() const { return rates_; }
    const HeomParams& params() const { return prm_; }

    // Eq. (A1) right-hand side over the flattened hierarchy
    void rhs(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) const {
        Mat8 ht = h0_;
        if (pulse_.enabled()) {
            const double e = field_value(t, pulse_);
            if (e != 0.0) ht -= e * dip_;
        }
        const std::size_t n = ado_count();
        const int nthreads = prm_.rhs_threads;
        if (nthreads <= 1 || n < 64) {
            rhs_range(ht, y, dy, 0, n);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (n + nthreads - 1) / nthreads;
            for (int w = 0; w < nthreads; ++w) {
                const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&, lo, hi] { rhs_range(ht, y, dy, lo, hi); });
            }
            for (auto& th : pool) th.join();
        }
    }

    Mat8 lindblad_total(const Mat8& rho) const {
        Mat8 out = Mat8::Zero();
        if (rates_.g3 != 0.0) {
            out += rates_.g3 * (d3_ * rho * d3_.transpose());
            out -= 0.5 * rates_.g3 * (n3_ * rho + rho * n3_);
        }
        if (rates_.g12 != 0.0) {
            out += rates_.g12 * (d12_ * rho * d12_.transpose());
            out -= 0.5 * rates_.g12 * (n12_ * rho + rho * n12_);
        }
        return out;
    }

    // instantaneous emitted-quanta rates from a system density matrix
    double flux_res(const Mat8& rho) const { return rates_.g3 * (n3_ * rho).trace().real(); }
    double flux_loss(const Mat8& rho) const { return rates_.g12 * (n12_ * rho).trace().real(); }

private:
    void build_tables() {
        const int nk = static_cast<int>(modes_.size());
        const std::size_t n = hier_.size();
        drift_.assign(n, cplx(0.0));
        up_c_.assign(n * nk, 0.0);
        down_a_.assign(n * nk, cplx(0.0));
        down_t_.assign(n * nk, cplx(0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (int k = 0; k < nk; ++k) {
                const int occ = hier_.indices[i].empty() ? 0 : hier_.indices[i][k];
                drift_[i] += cplx(0.0, 1.0) * static_cast<double>(occ) * modes_[k].gamma;
                double b = std::abs(modes_[k].alpha);
                if (b == 0.0) b = std::max(std::abs(modes_[k].alpha_tilde), 1e-300);
                if (prm_.scaled_ados) {
                    up_c_[i * nk + k] = std::sqrt((occ + 1.0) * b);
                    if (occ > 0) {
                        const double f = std::sqrt(occ / b);
                        down_a_[i * nk + k] = f * modes_[k].alpha;
                        down_t_[i * nk + k] = f * modes_[k].alpha_tilde;
                    }
                } else {
                    up_c_[i * nk + k] = 1.0;
                    if (occ > 0) {
                        down_a_[i * nk + k] = static_cast<double>(occ) * modes_[k].alpha;
                        down_t_[i * nk + k] = static_cast<double>(occ) * modes_[k].alpha_tilde;
                    }
                }
            }
        }
    }

    void rhs_range(const Mat8& ht, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy, std::size_t lo,
                   std::size_t hi) const {
        constexpr int sz = kDim * kDim;
        const int nk = static_cast<int>(modes_.size());
        const cplx I(0.0, 1.0);
        Mat8 acc;
        for (std::size_t i = lo; i < hi; ++i) {
            Eigen::Map<const Mat8> r(y.data() + i * sz);
            Eigen::Map<Mat8> out(dy.data() + i * sz);
            out.noalias() = -I * (ht * r);
            out.noalias() += I * (r * ht);
            if (drift_[i] != cplx(0.0)) out += drift_[i] * r;

            bool any_up = false;
            acc.setZero();
            for (int k = 0; k < nk; ++k) {
                const auto ip = hier_.up(i, k);
                if (ip >= 0) {
                    acc.noalias() += up_c_[i * nk + k] * Eigen::Map<const Mat8>(y.data() + ip * sz);
                    any_up = true;
                }
            }
            if (any_up) out.array() += mi_smask_.array() * acc.array();

            for (int k = 0; k < nk; ++k) {
                const auto im = hier_.down(i, k);
                if (im < 0) continue;
                Eigen::Map<const Mat8> m(y.data() + im * sz);
                const cplx a = -I * down_a_[i * nk + k];
                const cplx b = I * down_t_[i * nk + k];
                out.noalias() += a * (svec_.asDiagonal() * m);
                out.noalias() += b * (m * svec_.asDiagonal());
            }

            if (i == 0 && (rates_.g3 != 0.0 || rates_.g12 != 0.0)) out += lindblad_total(r);
        }
    }

    SystemOperators ops_;
    Pulse pulse_;
    EmissionRates rates_;
    HeomParams prm_;
    std::vector<BathTerm> modes_;
    Hierarchy hier_;
    std::vector<cplx> drift_;
    std::vector<double> up_c_;
    std::vector<cplx> down_a_, down_t_;
    Mat8 h0_, dip_, mi_smask_, d3_, d12_, n3_, n12_;
    Vec8 svec_;
};

struct HierarchyState {
    Eigen::VectorXcd data;

    static HierarchyState zero(const HeomContext& ctx) {
        HierarchyState s;
        s.data = Eigen::VectorXcd::Zero(ctx.dim());
        return s;
    }
    static HierarchyState from_system(const HeomContext& ctx, const Mat8& rho) {
        HierarchyState s = zero(ctx);
        s.rho_s() = rho;
        return s;
    }
    Eigen::Map<Mat8> rho_s() { return Eigen::Map<Mat8>(data.data()); }
    Eigen::Map<const Mat8> rho_s() const { return Eigen::Map<const Mat8>(data.data()); }
};

struct IntegratorConfig {
    double rel_tol = 1e-7;
    double abs_tol = 1e-10;
    double initial_step_au = 1e5;
    double max_step_au = 0.0;
    double t_final_au = 0.0;  // set by the run layer

    StepControl control() const {
        StepControl c;
        c.rel_tol = rel_tol;
        c.abs_tol = abs_tol;
        c.initial_step = initial_step_au;
        c.max_step = max_step_au;
        return c;
    }
};

struct RunMonitors {
    double max_trace_dev = 0.0;
    double max_herm_dev = 0.0;
    double min_rho_eigenvalue = 1.0;
    StepperStats steps;

    void observe(const Mat8& rho) {
        max_trace_dev = std::max(max_trace_dev, std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag()));
        max_herm_dev = std::max(max_herm_dev, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Mat8> es(0.5 * (rho + Mat8(rho.adjoint())), Eigen::EigenvaluesOnly);
        min_rho_eigenvalue = std::min(min_rho_eigenvalue, es.eigenvalues().minCoeff());
    }
};

// Propagate from t0 to t1 sampling the system matrix on the fixed grid
// t0 + j*sample_dt (steps are aligned to grid points and to the pulse edge).
// The sampler is called as cb(t_au, rho_s).
template <typename Sampler>
RunMonitors propagate(const HeomContext& ctx, HierarchyState& state, double t0, double t1,
                      const IntegratorConfig& icfg, double sample_dt, Sampler&& cb) {
    if (!(t1 > t0)) throw std::invalid_argument("propagate: t1 must exceed t0");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("propagate: sample_dt must be positive");

    CashKarpStepper stepper([&ctx](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        ctx.rhs(t, y, dy);
    }, ctx.dim(), icfg.control());

    RunMonitors mon;
    auto sample = [&](double t) {
        const Mat8 rho = state.rho_s();
        mon.observe(rho);
        cb(t, rho);
    };

    const double eps = 1e-6 * sample_dt;
    double t = t0;
    sample(t);
    double last_sampled = t0;
    long j = 1;
    double t_next = t0 + sample_dt;
    const double tau_edge = ctx.pulse().enabled() ? ctx.pulse().tau_max : -1.0;
    while (t < t1 - eps) {
        double limit = std::min(t_next, t1);
        if (tau_edge > t + eps && tau_edge < limit - eps) limit = tau_edge;
        t = stepper.step(t, limit, state.data);
        if (t >= t_next - eps) {
            last_sampled = std::min(t_next, t1);
            sample(last_sampled);
            ++j;
            t_next = t0 + j * sample_dt;
        }
    }
    if (last_sampled < t1 - eps) sample(t1);
    mon.steps = stepper.stats();
    return mon;
}

}  // namespace qnet
