#include "keb/profile_polynomials.hpp"

#include <algorithm>
#include <cmath>

#include "keb/error.hpp"

namespace keb {

namespace {

double factorial_ratio(int a, int b, int c) {
    // a! b! / c!
    if (c <= 20) {
        auto fact = [](int x) {
            double f = 1.0;
            for (int i = 2; i <= x; ++i) f *= i;
            return f;
        };
        return fact(a) * fact(b) / fact(c);
    }
    return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(c + 1.0));
}

double max_abs(const std::vector<double>& v) {
    double out = 0.0;
    for (double x : v) out = std::max(out, std::abs(x));
    return out;
}

} // namespace

RealPolynomial build_P(const EigenSpec& spec) {
    RealPolynomial P = linear_power(spec.nu(), static_cast<std::size_t>(spec.k() - 1));
    for (int i = 0; i < spec.n(); ++i) P = P * RealPolynomial::linear_factor(spec.mu(i));
    return P;
}

RealPolynomial build_Q(const RealPolynomial& P, const EigenSpec& spec) {
    const RealPolynomial integrand = RealPolynomial({0.0, static_cast<double>(spec.m() + 1)}) * P;
    return antiderivative(integrand, spec.nu(), 0.0);
}

RealPolynomial build_P_hat(const RealPolynomial& P, const EigenSpec& spec) {
    return hat_transform(P, static_cast<std::size_t>(spec.m() - 1));
}

RealPolynomial build_Q_hat(const RealPolynomial& Q, const EigenSpec& spec) {
    return hat_transform(Q, static_cast<std::size_t>(spec.m() + 1));
}

HGFactors factor_h_g(const EigenSpec& spec) {
    const RealPolynomial P = build_P(spec);
    const RealPolynomial Q = build_Q(P, spec);
    const RealPolynomial P_hat = build_P_hat(P, spec);
    const RealPolynomial Q_hat = build_Q_hat(Q, spec);
    const double root = spec.lambda_star();

    auto hdiv = synthetic_divide_repeated(P_hat, root, static_cast<std::size_t>(spec.k() - 1));
    auto gdiv = synthetic_divide_repeated(Q_hat, root, static_cast<std::size_t>(spec.k()));

    const double rel_h = hdiv.remainders.empty() ? 0.0 : max_abs(hdiv.remainders) / P_hat.scale();
    const double rel_g = max_abs(gdiv.remainders) / Q_hat.scale();
    const double rel = std::max(rel_h, rel_g);
    if (!(rel <= kDivisionTolerance))
        throw FactorizationError("factor_h_g: remainder " + std::to_string(rel) + " relative to scale for " +
                                 spec.to_string());
    return {std::move(hdiv.quotient), std::move(gdiv.quotient), rel};
}

QSplit compute_c(const EigenSpec& spec) {
    const auto lambda = spec.common_eigenvalue();
    if (!lambda) throw PreconditionError("compute_c: eigenvalues must all be equal, got " + spec.to_string());
    const RealPolynomial Q = build_Q(build_P(spec), spec);
    auto div = synthetic_divide_repeated(Q, spec.mu(0), static_cast<std::size_t>(spec.n() + 1));
    QSplit out;
    out.c = div.remainders.front();
    out.T = std::move(div.quotient);
    for (std::size_t i = 1; i < div.remainders.size(); ++i)
        out.max_inner_remainder = std::max(out.max_inner_remainder, std::abs(div.remainders[i]));
    out.q_scale = Q.scale();
    return out;
}

double beta_identity_residual(const EigenSpec& spec) {
    if (!spec.common_eigenvalue())
        throw PreconditionError("beta_identity_residual: eigenvalues must all be equal, got " + spec.to_string());
    const int n = spec.n();
    const int k = spec.k();
    const int m = spec.m();
    return spec.mu(0) * factorial_ratio(k, n, m + 1) + spec.nu() * factorial_ratio(k - 1, n + 1, m + 1);
}

RationalityVerdict is_rational_case(const EigenSpec& spec) {
    const auto lambda = spec.common_eigenvalue();
    if (!lambda) throw PreconditionError("is_rational_case: eigenvalues must all be equal, got " + spec.to_string());
    RationalityVerdict v;
    v.lambda_gap = *lambda + static_cast<double>(spec.n() + 1) / spec.k();
    const QSplit split = compute_c(spec);
    v.c = split.c;
    v.beta_residual = beta_identity_residual(spec);
    v.is_rational = std::abs(v.lambda_gap) <= 1e-12;

    const bool c_vanishes = std::abs(split.c) <= kDivisionTolerance * split.q_scale;
    const bool disagree = v.is_rational ? !c_vanishes : (c_vanishes && std::abs(v.lambda_gap) >= 1e-6);
    if (disagree)
        throw ConsistencyError("is_rational_case: eigenvalue criterion and c = Q(mu) disagree for " +
                               spec.to_string() + " (c=" + std::to_string(split.c) + ")");
    return v;
}

} // namespace keb
