#include "keb/ode.hpp"

#include <algorithm>
#include <cmath>

#include "keb/error.hpp"

namespace keb {

namespace {

// Dormand & Prince (1980) RK5(4)7FM tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - b_hat
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

} // namespace

std::vector<OdeNode> integrate_dp45(const std::function<double(double, double)>& f, double t0, double y0, double t1,
                                    const OdeOptions& options) {
    const double direction = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    std::vector<OdeNode> nodes;
    double t = t0;
    double y = y0;
    double k1 = f(t, y);
    if (!std::isfinite(k1)) throw SolverError("integrate_dp45: non-finite slope at start", t, y);
    nodes.push_back({t, y, k1});
    if (span == 0.0) return nodes;

    double h = std::min({options.initial_step, options.max_step, span});
    long steps = 0;
    while (direction * (t1 - t) > 0.0) {
        if (++steps > options.max_steps) throw SolverError("integrate_dp45: step budget exhausted", t, y);
        const double remaining = std::abs(t1 - t);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        const double dt = direction * h;
        const double k2 = f(t + c2 * dt, y + dt * a21 * k1);
        const double k3 = f(t + c3 * dt, y + dt * (a31 * k1 + a32 * k2));
        const double k4 = f(t + c4 * dt, y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(t + c5 * dt, y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = f(t + dt, y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y_new = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double t_new = last ? t1 : t + dt;
        const double k7 = f(t_new, y_new);
        const double err_abs = std::abs(dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        const double scale = options.abs_tol + options.rel_tol * std::max(std::abs(y), std::abs(y_new));
        const double err = err_abs / scale;

        if (!std::isfinite(err) || !std::isfinite(k7)) {
            h *= kMinFactor;
            if (h < options.min_step) throw SolverError("integrate_dp45: non-finite right-hand side", t, y);
            continue;
        }

        const double factor =
            err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
        if (err <= 1.0) {
            t = t_new;
            y = y_new;
            k1 = k7;
            nodes.push_back({t, y, k1});
            h = std::min(h * factor, options.max_step);
        } else {
            h *= std::min(factor, 1.0);
            if (h < options.min_step) throw SolverError("integrate_dp45: step size underflow", t, y);
        }
    }
    return nodes;
}

} // namespace keb
