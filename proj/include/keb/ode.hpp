#pragma once

#include <functional>
#include <vector>

namespace keb {

/// Tolerances and limits for the adaptive scalar integrator.
struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    double max_step = 1.0 / 64.0;
    double min_step = 1e-14;
    long max_steps = 2'000'000;
};

/// One accepted node of an integration: abscissa, state and slope.
struct OdeNode {
    double t;
    double y;
    double dy;
};

/// Dormand-Prince 5(4) with FSAL and local extrapolation for a scalar ODE
/// y' = f(t, y). Integrates from t0 toward t1 (either direction), landing
/// exactly on t1. Returns every accepted node, starting with (t0, y0).
///
/// Throws SolverError on step-size underflow, step-count exhaustion or a
/// non-finite right-hand side.
std::vector<OdeNode> integrate_dp45(const std::function<double(double, double)>& f, double t0, double y0, double t1,
                                    const OdeOptions& options);

} // namespace keb
