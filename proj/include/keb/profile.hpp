#pragma once

#include <vector>

#include "keb/eigen_spec.hpp"
#include "keb/ode.hpp"
#include "keb/polynomial.hpp"

namespace keb {

/// Right-hand side of the regularised profile equation
///
///   W' = -r W^2 B(r^2 W) / h(lambda_star + r^2 W),
///
/// where (2h + g)(lambda_star + s) = s B(s). The constant term of the shifted
/// polynomial vanishes because g(lambda_star) = -2 h(lambda_star), so the
/// factor 1/r of the singular form is removed analytically and the equation
/// is regular on all of [0, 1].
class WRhs {
public:
    WRhs(const EigenSpec& spec, RealPolynomial h, RealPolynomial g);

    /// Throws SignViolation when |h(lambda_star + r^2 W)| < 1e-13 scale(h).
    double operator()(double r, double w) const;

    /// Partial derivatives of the right-hand side.
    struct Partials {
        double value;
        double d_r;
        double d_w;
    };
    Partials partials(double r, double w) const;

    /// W'' along a solution: f_r + f_W f.
    double second_derivative(double r, double w) const;

    const RealPolynomial& h() const noexcept { return h_; }
    const RealPolynomial& g() const noexcept { return g_; }
    /// B(s) with (2h + g)(lambda_star + s) = s B(s)
    const RealPolynomial& shifted_quotient() const noexcept { return b_; }
    double lambda_star() const noexcept { return lambda_star_; }

private:
    double checked_h(double z, double r, double w) const;

    double lambda_star_;
    RealPolynomial h_;
    RealPolynomial dh_;
    RealPolynomial g_;
    RealPolynomial b_;
    RealPolynomial db_;
    double h_scale_;
};

/// Stand-alone form of the right-hand side; builds the shifted quotient on each call.
double w_rhs(double r, double w, const EigenSpec& spec, const RealPolynomial& h, const RealPolynomial& g);

/// Solved profile W on [0, 1] with Z = lambda_star + r^2 W.
///
/// The grid is stored in integration order, strictly decreasing from 1 to 0.
/// Evaluation between nodes uses a quintic Hermite interpolant built from the
/// stored W, W' and W''. Functions of r accept [-1, 1]: Z, W and phi are even,
/// so negative radii are mapped to |r| (with the sign of odd derivatives
/// flipped). Anything outside [-1, 1] raises DomainError.
class ProfileSolution {
public:
    ProfileSolution(EigenSpec spec, WRhs rhs, RealPolynomial P, RealPolynomial Q, std::vector<OdeNode> nodes,
                    std::vector<double> w_second, OdeOptions options);

    const EigenSpec& spec() const noexcept { return spec_; }
    const WRhs& rhs() const noexcept { return rhs_; }
    const RealPolynomial& P() const noexcept { return P_; }
    const RealPolynomial& Q() const noexcept { return Q_; }
    const RealPolynomial& P_hat() const noexcept { return P_hat_; }
    const RealPolynomial& Q_hat() const noexcept { return Q_hat_; }
    const OdeOptions& options() const noexcept { return options_; }

    std::vector<double> grid() const;
    std::vector<double> w_values() const;
    std::size_t node_count() const noexcept { return nodes_.size(); }

    /// a = W(0)
    double a() const noexcept { return nodes_.back().y; }

    double w(double r) const;
    /// derivative of the interpolant
    double w_prime(double r) const;
    /// right-hand side evaluated on the interpolated W
    double w_prime_ode(double r) const;

    double z(double r) const;
    /// 2 r W + r^2 W' from the interpolant
    double z_prime(double r) const;

    /// r Z' P-hat(Z) + Q-hat(Z), using the interpolant derivative
    double ode_residual(double r) const;

private:
    struct Local {
        double value;
        double slope;
    };
    Local interpolate(double r_abs) const;

    EigenSpec spec_;
    WRhs rhs_;
    RealPolynomial P_;
    RealPolynomial Q_;
    RealPolynomial P_hat_;
    RealPolynomial Q_hat_;
    std::vector<OdeNode> nodes_;
    std::vector<double> w2_;
    OdeOptions options_;
};

/// Integrates W backward from r = 1 (W = -lambda_star) to r = 0 and checks the
/// solution's postconditions. Requires every eigenvalue below 1.
ProfileSolution solve_profile(const EigenSpec& spec, double rel_tol = 1e-10, double abs_tol = 1e-12);
ProfileSolution solve_profile(const EigenSpec& spec, const OdeOptions& options);

/// (1 - r^2)/(2 + mu - mu r^2) for the rational case lambda = -(n+1)/k.
double closed_form_Z(const EigenSpec& spec, double r);

double z_eval(const ProfileSolution& sol, double r);
double z_prime(const ProfileSolution& sol, double r);

} // namespace keb
