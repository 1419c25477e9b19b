#include "keb/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "keb/error.hpp"
#include "keb/profile_polynomials.hpp"

namespace keb {

namespace {

constexpr double kHFloor = 1e-13;

RealPolynomial build_shifted_quotient(const EigenSpec& spec, const RealPolynomial& h, const RealPolynomial& g) {
    const auto shifted = taylor_shift(h * 2.0 + g, spec.lambda_star());
    const auto c = shifted.coefficients();
    if (c.size() <= 1) return RealPolynomial{};
    return RealPolynomial(std::vector<double>(c.begin() + 1, c.end()));
}

void check_radius(double r, const char* where) {
    if (!(std::abs(r) <= 1.0)) throw DomainError(std::string(where) + ": r=" + std::to_string(r) + " outside [-1, 1]");
}

} // namespace

WRhs::WRhs(const EigenSpec& spec, RealPolynomial h, RealPolynomial g)
    : lambda_star_(spec.lambda_star()), h_(std::move(h)), dh_(derivative(h_)), g_(std::move(g)),
      b_(build_shifted_quotient(spec, h_, g_)), db_(derivative(b_)), h_scale_(h_.scale()) {}

double WRhs::checked_h(double z, double r, double w) const {
    const double hz = h_(z);
    if (!(std::abs(hz) >= kHFloor * h_scale_))
        throw SignViolation("profile right-hand side: h(Z) vanishes at r=" + std::to_string(r) +
                            ", W=" + std::to_string(w));
    return hz;
}

double WRhs::operator()(double r, double w) const {
    const double s = r * r * w;
    const double hz = checked_h(lambda_star_ + s, r, w);
    return -r * w * w * b_(s) / hz;
}

WRhs::Partials WRhs::partials(double r, double w) const {
    const double r2 = r * r;
    const double s = r2 * w;
    const double z = lambda_star_ + s;
    const double hz = checked_h(z, r, w);
    const double dhz = dh_(z);
    const double b = b_(s);
    const double db = db_(s);
    const double w2 = w * w;

    Partials p{};
    p.value = -r * w2 * b / hz;
    p.d_r = -w2 * (b + 2.0 * r2 * w * db) / hz + r * w2 * b * dhz * 2.0 * r * w / (hz * hz);
    p.d_w = -r * (2.0 * w * b + w2 * r2 * db) / hz + r * w2 * b * dhz * r2 / (hz * hz);
    return p;
}

double WRhs::second_derivative(double r, double w) const {
    const auto p = partials(r, w);
    return p.d_r + p.d_w * p.value;
}

double w_rhs(double r, double w, const EigenSpec& spec, const RealPolynomial& h, const RealPolynomial& g) {
    return WRhs(spec, h, g)(r, w);
}

ProfileSolution::ProfileSolution(EigenSpec spec, WRhs rhs, RealPolynomial P, RealPolynomial Q,
                                 std::vector<OdeNode> nodes, std::vector<double> w_second, OdeOptions options)
    : spec_(std::move(spec)), rhs_(std::move(rhs)), P_(std::move(P)), Q_(std::move(Q)),
      P_hat_(build_P_hat(P_, spec_)), Q_hat_(build_Q_hat(Q_, spec_)), nodes_(std::move(nodes)),
      w2_(std::move(w_second)), options_(options) {
    if (nodes_.size() < 2 || w2_.size() != nodes_.size())
        throw PreconditionError("ProfileSolution: need at least two nodes with matching second derivatives");
}

std::vector<double> ProfileSolution::grid() const {
    std::vector<double> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.t);
    return out;
}

std::vector<double> ProfileSolution::w_values() const {
    std::vector<double> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.y);
    return out;
}

ProfileSolution::Local ProfileSolution::interpolate(double r) const {
    // nodes_ decrease in t; find i with t[i] >= r >= t[i+1]
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), r,
                               [](const OdeNode& n, double x) { return n.t > x; });
    std::size_t i1 = static_cast<std::size_t>(it - nodes_.begin());
    i1 = std::clamp<std::size_t>(i1, 1, nodes_.size() - 1);
    const std::size_t i0 = i1 - 1;
    const OdeNode& a = nodes_[i0];
    const OdeNode& b = nodes_[i1];
    const double H = b.t - a.t;
    const double t = (r - a.t) / H;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;

    const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    const double h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const double h5 = 0.5 * t3 - t4 + 0.5 * t5;

    const double d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    const double d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    const double d2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    const double d3 = -d0;
    const double d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    const double d5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;

    const double H2 = H * H;
    const double value = a.y * h0 + H * a.dy * h1 + H2 * w2_[i0] * h2 + b.y * h3 + H * b.dy * h4 + H2 * w2_[i1] * h5;
    const double slope =
        (a.y * d0 + H * a.dy * d1 + H2 * w2_[i0] * d2 + b.y * d3 + H * b.dy * d4 + H2 * w2_[i1] * d5) / H;
    return {value, slope};
}

double ProfileSolution::w(double r) const {
    check_radius(r, "W");
    return interpolate(std::abs(r)).value;
}

double ProfileSolution::w_prime(double r) const {
    check_radius(r, "W'");
    const double s = interpolate(std::abs(r)).slope;
    return r < 0.0 ? -s : s;
}

double ProfileSolution::w_prime_ode(double r) const {
    check_radius(r, "W'");
    const double ra = std::abs(r);
    const double s = rhs_(ra, interpolate(ra).value);
    return r < 0.0 ? -s : s;
}

double ProfileSolution::z(double r) const {
    check_radius(r, "Z");
    return spec_.lambda_star() + r * r * interpolate(std::abs(r)).value;
}

double ProfileSolution::z_prime(double r) const {
    check_radius(r, "Z'");
    const double ra = std::abs(r);
    const auto loc = interpolate(ra);
    const double d = 2.0 * ra * loc.value + ra * ra * loc.slope;
    return r < 0.0 ? -d : d;
}

double ProfileSolution::ode_residual(double r) const {
    check_radius(r, "ODE residual");
    const double ra = std::abs(r);
    const double zv = z(ra);
    return ra * z_prime(ra) * P_hat_(zv) + Q_hat_(zv);
}

ProfileSolution solve_profile(const EigenSpec& spec, double rel_tol, double abs_tol) {
    OdeOptions options;
    options.rel_tol = rel_tol;
    options.abs_tol = abs_tol;
    return solve_profile(spec, options);
}

ProfileSolution solve_profile(const EigenSpec& spec, const OdeOptions& options) {
    if (!spec.below_one())
        throw PreconditionError("solve_profile: eigenvalues must lie below 1, got " + spec.to_string());
    if (!(options.rel_tol > 0.0) || !(options.abs_tol >= 0.0))
        throw PreconditionError("solve_profile: tolerances must be positive");

    auto factors = factor_h_g(spec);
    WRhs rhs(spec, factors.h, factors.g);
    const double ls = spec.lambda_star();

    auto nodes = integrate_dp45([&rhs](double r, double w) { return rhs(r, w); }, 1.0, -ls, 0.0, options);

    std::vector<double> w2;
    w2.reserve(nodes.size());
    for (const auto& n : nodes) w2.push_back(rhs.second_derivative(n.t, n.y));

    double prev_z = -1.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!(n.y < 0.0)) throw SolverError("solve_profile: W lost its sign", n.t, n.y);
        const double zv = ls + n.t * n.t * n.y;
        if (i > 0 && !(zv > prev_z)) throw SolverError("solve_profile: Z is not strictly monotone", n.t, n.y);
        prev_z = zv;
    }

    const double z1 = -2.0 * ls + nodes.front().dy;
    if (!(std::abs(z1 + 1.0) <= 1e-8)) throw SolverError("solve_profile: Z'(1) != -1", 1.0, nodes.front().y);
    // Z(0) = lambda_star holds by construction of Z = lambda_star + r^2 W

    return ProfileSolution(spec, std::move(rhs), build_P(spec), build_Q(build_P(spec), spec), std::move(nodes),
                           std::move(w2), options);
}

double closed_form_Z(const EigenSpec& spec, double r) {
    if (!is_rational_case(spec).is_rational)
        throw PreconditionError("closed_form_Z: requires lambda = -(n+1)/k, got " + spec.to_string());
    check_radius(r, "closed_form_Z");
    const double mu = spec.mu(0);
    const double r2 = r * r;
    return (1.0 - r2) / (2.0 + mu - mu * r2);
}

double z_eval(const ProfileSolution& sol, double r) { return sol.z(r); }
double z_prime(const ProfileSolution& sol, double r) { return sol.z_prime(r); }

} // namespace keb
