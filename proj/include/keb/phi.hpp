#pragma once

#include <vector>

#include "keb/profile.hpp"

namespace keb {

/// phi, phi' and Y = 1/Z built on a solved profile.
///
/// phi = 2 rho Z with rho^(m+1) = 1/(-(2W + rW') W^(k-1) h(Z)), which is the
/// regular form of r^(2k-1)/(-Z' P-hat(Z)) and stays finite at r = 0. W' is
/// taken from the right-hand side on the interpolated W.
class PhiProfile {
public:
    explicit PhiProfile(ProfileSolution sol, int samples = 1001);

    const ProfileSolution& solution() const noexcept { return sol_; }
    const EigenSpec& spec() const noexcept { return sol_.spec(); }

    /// uniform radii on [0, 1] with cached phi, phi' and Y (Y is +inf at r = 1)
    const std::vector<double>& sample_radii() const noexcept { return radii_; }
    const std::vector<double>& sample_phi() const noexcept { return phi_; }
    const std::vector<double>& sample_phi_prime() const noexcept { return phi_prime_; }
    const std::vector<double>& sample_Y() const noexcept { return y_; }

private:
    ProfileSolution sol_;
    std::vector<double> radii_;
    std::vector<double> phi_;
    std::vector<double> phi_prime_;
    std::vector<double> y_;
};

/// Throws SignViolation when the radicand is not positive.
double eval_phi(const ProfileSolution& sol, double r);
double eval_phi(const PhiProfile& profile, double r);

/// phi (nu - 1/Z)/r, written as phi nu r W / Z for r <= 1/2 and
/// (nu phi - 2 rho)/r above, so neither endpoint divides by zero.
double eval_phi_prime(const PhiProfile& profile, double r);

/// 1/Z. Throws DomainError when Z(r) < 1e-13.
double eval_Y(const PhiProfile& profile, double r);
/// dY/dr = -Z'/Z^2, same domain as eval_Y.
double eval_Y_prime(const PhiProfile& profile, double r);

/// (m+1) r Z phi' + (m+1 - 2kZ) phi with phi' obtained by differentiating the
/// defining formula (through W''), so the check is independent of eval_phi_prime.
double phi_ode_residual(const PhiProfile& profile, double r);

} // namespace keb
