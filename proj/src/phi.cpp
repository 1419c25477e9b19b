#include "keb/phi.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "keb/error.hpp"

namespace keb {

namespace {

constexpr double kZFloor = 1e-13;

struct Radicand {
    double r;
    double w;
    double w1; // W' from the right-hand side
    double z;
    double big_r; // -(2W + rW') W^(k-1) h(Z), the reciprocal of rho^(m+1)
    double rho;
};

Radicand radicand(const ProfileSolution& sol, double r) {
    if (!(std::abs(r) <= 1.0)) throw DomainError("phi: r=" + std::to_string(r) + " outside [-1, 1]");
    const auto& spec = sol.spec();
    Radicand q{};
    q.r = std::abs(r);
    q.w = sol.w(q.r);
    q.w1 = sol.rhs()(q.r, q.w);
    q.z = spec.lambda_star() + q.r * q.r * q.w;
    q.big_r = -(2.0 * q.w + q.r * q.w1) * std::pow(q.w, spec.k() - 1) * sol.rhs().h()(q.z);
    if (!(q.big_r > 0.0))
        throw SignViolation("phi: nonpositive radicand at r=" + std::to_string(r) + " for " + spec.to_string());
    q.rho = std::pow(q.big_r, -1.0 / (spec.m() + 1));
    return q;
}

double checked_z(const ProfileSolution& sol, double r) {
    const double z = sol.z(r);
    if (!(z >= kZFloor)) throw DomainError("Y: Z(" + std::to_string(r) + ") too small, Y overflows");
    return z;
}

} // namespace

PhiProfile::PhiProfile(ProfileSolution sol, int samples) : sol_(std::move(sol)) {
    if (samples < 2) throw PreconditionError("PhiProfile: need at least two samples");
    const auto count = static_cast<std::size_t>(samples);
    radii_.reserve(count);
    phi_.reserve(count);
    phi_prime_.reserve(count);
    y_.reserve(count);
    for (int i = 0; i < samples; ++i) {
        const double r = i == samples - 1 ? 1.0 : static_cast<double>(i) / (samples - 1);
        radii_.push_back(r);
        phi_.push_back(eval_phi(sol_, r));
        phi_prime_.push_back(eval_phi_prime(*this, r));
        y_.push_back(i == samples - 1 ? std::numeric_limits<double>::infinity() : eval_Y(*this, r));
    }
}

double eval_phi(const ProfileSolution& sol, double r) {
    const auto q = radicand(sol, r);
    return 2.0 * q.rho * q.z;
}

double eval_phi(const PhiProfile& profile, double r) { return eval_phi(profile.solution(), r); }

double eval_phi_prime(const PhiProfile& profile, double r) {
    const auto q = radicand(profile.solution(), r);
    const double nu = profile.spec().nu();
    const double phi = 2.0 * q.rho * q.z;
    double d;
    if (q.r == 0.0)
        d = 0.0;
    else if (q.r <= 0.5)
        d = phi * nu * q.r * q.w / q.z;
    else
        d = (nu * phi - 2.0 * q.rho) / q.r;
    return r < 0.0 ? -d : d;
}

double eval_Y(const PhiProfile& profile, double r) { return 1.0 / checked_z(profile.solution(), r); }

double eval_Y_prime(const PhiProfile& profile, double r) {
    const double z = checked_z(profile.solution(), r);
    return -profile.solution().z_prime(r) / (z * z);
}

double phi_ode_residual(const PhiProfile& profile, double r) {
    const auto& sol = profile.solution();
    const auto& spec = sol.spec();
    const auto q = radicand(sol, r);
    const int m = spec.m();
    const int k = spec.k();
    const double w2 = sol.rhs().second_derivative(q.r, q.w);
    const double z1 = 2.0 * q.r * q.w + q.r * q.r * q.w1;

    // d/dr log of -(2W + rW'), W^(k-1) and h(Z)
    const double a = -(2.0 * q.w + q.r * q.w1);
    const double da = -(3.0 * q.w1 + q.r * w2);
    const auto& h = sol.rhs().h();
    const double log_r_prime = da / a + (k - 1) * q.w1 / q.w + derivative(h)(q.z) * z1 / h(q.z);

    const double phi = 2.0 * q.rho * q.z;
    const double phi_prime = 2.0 * q.rho * z1 - phi * log_r_prime / (m + 1);
    return (m + 1) * q.r * q.z * phi_prime + (m + 1 - 2.0 * k * q.z) * phi;
}

} // namespace keb
