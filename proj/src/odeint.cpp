#include "specbound/odeint.hpp"

#include <algorithm>
#include <cmath>

namespace specbound {

namespace {

// Dormand & Prince (1980) RK5(4)7M tableau, FSAL form.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kAlpha = 0.7 / 5.0; // PI controller exponents
constexpr double kBeta = 0.4 / 5.0;

struct Stepper {
    const RhsFunction& rhs;
    const IntegratorConfig& cfg;
    Vector k1, k2, k3, k4, k5, k6, k7;

    // One trial step from (t, y) with size h. Fills y_new and the scaled
    // error estimate; k1 must hold rhs(t, y) on entry (FSAL).
    double attempt(double t, const Vector& y, double h, Vector& y_new) {
        k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(t + h, y_new);

        const Vector err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double scale =
                cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            norm = std::max(norm, std::abs(err(i)) / scale);
        }
        return norm;
    }
};

} // namespace

Trajectory integrate(const RhsFunction& rhs, const Vector& y0, double t0, double t1,
                     const IntegratorConfig& cfg) {
    if (!y0.allFinite()) throw ValidationError("integrate: y0 must be finite");
    if (cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0 || cfg.max_steps < 1)
        throw ValidationError("integrate: bad integrator configuration");

    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(y0);
    if (t1 == t0) return traj;

    const double dir = (t1 > t0) ? 1.0 : -1.0;
    double t = t0;
    Vector y = y0;

    Stepper st{rhs, cfg, {}, {}, {}, {}, {}, {}, {}};
    st.k1 = rhs(t, y);

    double h = dir * std::min(1e-2 * std::abs(t1 - t0), 1.0);
    double err_prev = 1.0;
    Vector y_new(y.size());

    for (long step = 0; step < cfg.max_steps; ++step) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        const double err = st.attempt(t, y, h, y_new);

        bool reject = err > 1.0;
        if (!reject) {
            // negativity policy: small dips clamp, deep ones reject
            for (Eigen::Index i = 0; i < y_new.size() && !reject; ++i)
                if (y_new(i) < -cfg.abs_tol) reject = true;
        }

        if (reject) {
            if (err > 1.0) {
                const double fac = std::max(kMinFactor, kSafety * std::pow(err, -kAlpha));
                h *= fac;
            } else {
                h *= 0.5;
            }
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
                traj.termination = Termination::StepFailure;
                return traj;
            }
            continue;
        }

        for (Eigen::Index i = 0; i < y_new.size(); ++i)
            if (y_new(i) < 0.0) {
                y_new(i) = 0.0;
                ++traj.clamp_events;
            }

        t += h;
        y = y_new;
        st.k1 = st.k7; // FSAL
        traj.times.push_back(t);
        traj.states.push_back(y);
        if (t == t1 || dir * (t - t1) >= 0.0) {
            traj.termination = Termination::ReachedTEnd;
            return traj;
        }

        const double fac =
            kSafety * std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_prev, kBeta);
        h *= std::clamp(fac, kMinFactor, kMaxFactor);
        err_prev = std::max(err, 1e-10);
    }

    traj.termination = Termination::StepFailure;
    return traj;
}

EquilibriumResult integrate_to_equilibrium(const RhsFunction& rhs, const Vector& y0,
                                           const IntegratorConfig& cfg) {
    // step tolerances must sit well below the convergence norm, otherwise
    // the integration error floor keeps ||rhs|| from ever reaching it
    IntegratorConfig step_cfg = cfg;
    step_cfg.rel_tol = std::min(cfg.rel_tol, 0.01 * cfg.convergence_norm_tol);
    step_cfg.abs_tol = std::min(cfg.abs_tol, 0.01 * cfg.convergence_norm_tol);

    EquilibriumResult res;
    res.state = y0;
    res.trajectory.times.push_back(0.0);
    res.trajectory.states.push_back(y0);

    double t = 0.0;
    double window = 1.0;
    while (t < cfg.equilibrium_time_cap) {
        const double t_next = std::min(t + window, cfg.equilibrium_time_cap);
        Trajectory piece = integrate(rhs, res.state, t, t_next, step_cfg);
        for (size_t i = 1; i < piece.times.size(); ++i) {
            res.trajectory.times.push_back(piece.times[i]);
            res.trajectory.states.push_back(piece.states[i]);
        }
        res.trajectory.clamp_events += piece.clamp_events;
        res.state = res.trajectory.states.back();
        t = res.trajectory.times.back();
        if (piece.termination == Termination::StepFailure) {
            res.trajectory.termination = Termination::StepFailure;
            return res;
        }
        if (rhs(t, res.state).cwiseAbs().maxCoeff() < cfg.convergence_norm_tol) {
            res.converged = true;
            res.trajectory.termination = Termination::Converged;
            res.trajectory.converged_at = t;
            return res;
        }
        window *= 2.0;
    }
    res.trajectory.termination = Termination::ReachedTEnd;
    return res;
}

} // namespace specbound
