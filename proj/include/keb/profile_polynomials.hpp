#pragma once

#include "keb/eigen_spec.hpp"
#include "keb/polynomial.hpp"

namespace keb {

/// Relative remainder tolerance for divisions that are exact in exact arithmetic.
inline constexpr double kDivisionTolerance = 1e-10;

/// P(y) = (y - nu)^(k-1) prod_i (y - mu_i); monic of degree m-1.
RealPolynomial build_P(const EigenSpec& spec);

/// Q with Q' = (m+1) y P(y) and Q(nu) = 0; monic of degree m+1.
RealPolynomial build_Q(const RealPolynomial& P, const EigenSpec& spec);

/// P-hat = x^(m-1) P(1/x)
RealPolynomial build_P_hat(const RealPolynomial& P, const EigenSpec& spec);
/// Q-hat = x^(m+1) Q(1/x)
RealPolynomial build_Q_hat(const RealPolynomial& Q, const EigenSpec& spec);

/// P-hat = (x - lambda_star)^(k-1) h,  Q-hat = (x - lambda_star)^k g.
struct HGFactors {
    RealPolynomial h;
    RealPolynomial g;
    /// largest |remainder| / max|coefficient| seen across both divisions
    double relative_remainder = 0.0;
};

/// Throws FactorizationError when a discarded remainder exceeds
/// kDivisionTolerance relative to the dividend's largest coefficient.
HGFactors factor_h_g(const EigenSpec& spec);

/// Q = (y - mu)^(n+1) T + c for the equal-eigenvalue case.
struct QSplit {
    double c = 0.0;
    RealPolynomial T;
    /// remainders of divisions 2..n+1; zero in exact arithmetic
    double max_inner_remainder = 0.0;
    double q_scale = 0.0;
};

/// Requires all eigenvalues equal (PreconditionError otherwise).
QSplit compute_c(const EigenSpec& spec);

/// mu k! n!/(m+1)! + nu (k-1)! (n+1)!/(m+1)!, which vanishes exactly when
/// lambda = -(n+1)/k. Uses lgamma for m+1 > 20.
double beta_identity_residual(const EigenSpec& spec);

struct RationalityVerdict {
    bool is_rational = false;
    double c = 0.0;
    double beta_residual = 0.0;
    /// lambda + (n+1)/k
    double lambda_gap = 0.0;
};

/// True iff |lambda + (n+1)/k| <= 1e-12, cross-checked against |c| <= 1e-10 scale(Q).
/// Throws ConsistencyError when the eigenvalue criterion holds but c does not
/// vanish, or when c vanishes although |lambda + (n+1)/k| >= 1e-6.
RationalityVerdict is_rational_case(const EigenSpec& spec);

} // namespace keb
