// cash_karp.hpp — embedded Cash-Karp RK4(5) with a standard step controller.
//
// State is a flat complex vector; the RHS is any callable rhs(t, y, dy).
// Error norm: max over entries of |y5-y4| / (abs_tol + rel_tol*max(|y|,|y5|)).
// Controller: h *= clamp(0.9 * err^(-1/5), 0.2, 5.0), rejected steps retried.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "qnet/types.hpp"

namespace qnet {

struct StepControl {
    double rel_tol = 1e-7;
    double abs_tol = 1e-10;
    double initial_step = 1e5;   // a.u.
    double max_step = 0.0;       // 0: unlimited
    double min_step = 1e-2;      // underflow guard, a.u.
};

struct IntegrationError : std::runtime_error {
    double t;
    double err;
    IntegrationError(const std::string& what, double t_, double err_)
        : std::runtime_error(what + " at t = " + std::to_string(t_) + " a.u. (err = " + std::to_string(err_) + ")"),
          t(t_), err(err_) {}
};

struct StepperStats {
    long n_steps = 0;
    long n_rejected = 0;
    long n_rhs = 0;
};

class CashKarpStepper {
public:
    using Vec = Eigen::VectorXcd;
    using Rhs = std::function<void(double, const Vec&, Vec&)>;

    CashKarpStepper(Rhs rhs, Eigen::Index dim, StepControl ctrl) : rhs_(std::move(rhs)), ctrl_(ctrl) {
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &ytmp_, &y5_, &y4_}) v->resize(dim);
        h_ = ctrl.initial_step;
    }

    double suggested_step() const { return h_; }
    void set_step(double h) { h_ = h; }
    const StepperStats& stats() const { return stats_; }

    // One accepted step from t, not crossing t_limit. Returns the new t.
    double step(double t, double t_limit, Vec& y) {
        while (true) {
            double h = h_;
            if (ctrl_.max_step > 0.0) h = std::min(h, ctrl_.max_step);
            bool clipped = false;
            if (t + h >= t_limit) { h = t_limit - t; clipped = true; }
            if (h <= 0.0) return t_limit;

            const double err = attempt(t, h, y);
            ++stats_.n_steps;

            if (!std::isfinite(err))
                throw IntegrationError("CashKarp: non-finite error estimate (NaN state)", t, err);

            if (err <= 1.0) {
                y.swap(y5_);
                const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                const double h_next = h * grow;
                if (!clipped || h_next < h_) h_ = h_next;
                return clipped ? t_limit : t + h;
            }
            --stats_.n_steps;
            ++stats_.n_rejected;
            h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (h_ < ctrl_.min_step)
                throw IntegrationError("CashKarp: step size underflow", t, err);
        }
    }

private:
    // returns the scaled error of the trial step; y5_ holds the 5th-order result
    double attempt(double t, double h, const Vec& y) {
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 3.0 / 5, c5 = 1.0, c6 = 7.0 / 8;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 3.0 / 10, a42 = -9.0 / 10, a43 = 6.0 / 5;
        constexpr double a51 = -11.0 / 54, a52 = 5.0 / 2, a53 = -70.0 / 27, a54 = 35.0 / 27;
        constexpr double a61 = 1631.0 / 55296, a62 = 175.0 / 512, a63 = 575.0 / 13824,
                         a64 = 44275.0 / 110592, a65 = 253.0 / 4096;
        constexpr double b1 = 37.0 / 378, b3 = 250.0 / 621, b4 = 125.0 / 594, b6 = 512.0 / 1771;
        constexpr double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384, d4 = 13525.0 / 55296,
                         d5 = 277.0 / 14336, d6 = 1.0 / 4;

        rhs_(t, y, k1_);
        ytmp_ = y + h * a21 * k1_;
        rhs_(t + c2 * h, ytmp_, k2_);
        ytmp_ = y + h * (a31 * k1_ + a32 * k2_);
        rhs_(t + c3 * h, ytmp_, k3_);
        ytmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        rhs_(t + c4 * h, ytmp_, k4_);
        ytmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        rhs_(t + c5 * h, ytmp_, k5_);
        ytmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        rhs_(t + c6 * h, ytmp_, k6_);
        stats_.n_rhs += 6;

        y5_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b6 * k6_);
        y4_ = y + h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double diff = std::abs(y5_(i) - y4_(i));
            const double scale = ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(y(i)), std::abs(y5_(i)));
            err = std::max(err, diff / scale);
        }
        return err;
    }

    Rhs rhs_;
    StepControl ctrl_;
    double h_ = 0.0;
    StepperStats stats_;
    Vec k1_, k2_, k3_, k4_, k5_, k6_, ytmp_, y5_, y4_;
};

}  // namespace qnet
