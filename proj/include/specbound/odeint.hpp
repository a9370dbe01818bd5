#pragma once

#include <functional>
#include <vector>

#include "specbound/network.hpp"

namespace specbound {

using RhsFunction = std::function<Vector(double t, const Vector& y)>;

enum class Termination { ReachedTEnd, Converged, StepFailure };

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    Termination termination = Termination::ReachedTEnd;
    double converged_at = 0.0; // valid when termination == Converged
    long clamp_events = 0;     // components nudged from (-abs_tol, 0) back to 0

    const Vector& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
};

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    long max_steps = 1000000;
    double convergence_norm_tol = 1e-9;
    double equilibrium_time_cap = 1e6;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(t, y) over
/// [t0, t1] (either direction). Accepted states with components in
/// (-abs_tol, 0) are clamped to 0 and counted; deeper negative excursions
/// reject the step and halve it.
Trajectory integrate(const RhsFunction& rhs, const Vector& y0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

struct EquilibriumResult {
    Vector state;
    Trajectory trajectory;
    bool converged = false;
};

/// Integrates over windows of doubling length until ‖rhs(y)‖∞ falls below
/// cfg.convergence_norm_tol or the time cap is hit; the caller inspects
/// `converged`.
EquilibriumResult integrate_to_equilibrium(const RhsFunction& rhs, const Vector& y0,
                                           const IntegratorConfig& cfg = {});

} // namespace specbound
