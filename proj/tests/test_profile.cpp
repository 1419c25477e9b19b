#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "keb/error.hpp"
#include "keb/profile.hpp"
#include "keb/profile_polynomials.hpp"

using namespace keb;

namespace {

double sup_gap_to_closed_form(const ProfileSolution& sol, int samples = 2001) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = static_cast<double>(i) / (samples - 1);
        worst = std::max(worst, std::abs(sol.z(r) - closed_form_Z(sol.spec(), r)));
    }
    return worst;
}

EigenSpec random_spec(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> eig(-3.0, 0.9);
    const int n = dim(rng);
    const int k = dim(rng);
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (double& v : ev) v = eig(rng);
    return EigenSpec(n, k, ev);
}

} // namespace

TEST_CASE("right-hand side for n=1 k=1 lambda=-2") {
    const EigenSpec spec(1, 1, {-2.0});
    const auto f = factor_h_g(spec);
    const WRhs rhs(spec, f.h, f.g);
    const auto& B = rhs.shifted_quotient();
    REQUIRE(B.degree() == 1);
    CHECK(B[0] == doctest::Approx(-8.0 / 3.0).epsilon(1e-14));
    CHECK(B[1] == doctest::Approx(-32.0 / 27.0).epsilon(1e-14));
    CHECK(rhs(1.0, -1.5) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(w_rhs(1.0, -1.5, spec, f.h, f.g) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rhs(0.0, -3.0) == 0.0);

    // W = -3/(2/3 + 4/3 r^2) solves it exactly
    for (double r : {0.1, 0.4, 0.77}) {
        const double d = 2.0 / 3.0 + 4.0 / 3.0 * r * r;
        const double w = -3.0 / d;
        const double wp = 3.0 * (8.0 / 3.0) * r / (d * d);
        const double wpp = 8.0 / (d * d) - 2.0 * 8.0 * r * (8.0 / 3.0) * r / (d * d * d);
        CHECK(rhs(r, w) == doctest::Approx(wp).epsilon(1e-13));
        CHECK(rhs.second_derivative(r, w) == doctest::Approx(wpp).epsilon(1e-12));
    }
}

TEST_CASE("partials agree with central differences") {
    const EigenSpec spec(2, 3, {-1.2, 0.4});
    const auto f = factor_h_g(spec);
    const WRhs rhs(spec, f.h, f.g);
    const double r = 0.6, w = -1.1, e = 1e-6;
    const auto p = rhs.partials(r, w);
    CHECK(p.d_r == doctest::Approx((rhs(r + e, w) - rhs(r - e, w)) / (2 * e)).epsilon(1e-7));
    CHECK(p.d_w == doctest::Approx((rhs(r, w + e) - rhs(r, w - e)) / (2 * e)).epsilon(1e-7));
}

TEST_CASE("closed-form example values") {
    const auto spec = EigenSpec::uniform(1, 1, -2.0);
    CHECK(closed_form_Z(spec, 0.0) == doctest::Approx(1.5));
    CHECK(closed_form_Z(spec, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(closed_form_Z(spec, 1.0) == 0.0);
    CHECK_THROWS_AS(closed_form_Z(EigenSpec::uniform(1, 1, -1.0), 0.5), PreconditionError);
}

TEST_CASE("solver reproduces the closed form in rational cases") {
    for (auto [n, k, lambda] : {std::tuple{1, 1, -2.0}, {1, 2, -1.0}, {2, 3, -1.0}, {3, 2, -2.0}}) {
        const auto spec = EigenSpec::uniform(n, k, lambda);
        CAPTURE(spec.to_string());
        const auto sol = solve_profile(spec);
        CHECK(sup_gap_to_closed_form(sol) <= 1e-8);
        CHECK(std::abs(sol.z_prime(1.0) + 1.0) <= 1e-8);
        for (int i = 0; i <= 100; ++i) CHECK(std::abs(sol.ode_residual(i / 100.0)) <= 1e-8);
    }
    const auto sol = solve_profile(EigenSpec::uniform(1, 1, -2.0));
    CHECK(sol.z(0.5) == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(sol.a() == doctest::Approx(-4.5).epsilon(1e-10));
    CHECK(sol.w_prime(1.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("boundary values over mixed specs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const EigenSpec spec = random_spec(rng);
        CAPTURE(spec.to_string());
        const auto sol = solve_profile(spec);
        CHECK(std::abs(sol.z(0.0) - spec.lambda_star()) <= 1e-8);
        CHECK(std::abs(sol.z_prime(1.0) + 1.0) <= 1e-8);
        CHECK(std::abs(sol.z(1.0)) <= 1e-15);
        for (int i = 0; i <= 50; ++i) CHECK(std::abs(sol.ode_residual(i / 50.0)) <= 1e-7);

        // Z'' (0) = 2a, by central difference on the even extension
        const double e = 1e-4;
        const double z2 = (sol.z(e) - 2.0 * sol.z(0.0) + sol.z(-e)) / (e * e);
        CHECK(z2 == doctest::Approx(2.0 * sol.a()).epsilon(1e-5));

        const auto grid = sol.grid();
        CHECK(grid.front() == 1.0);
        CHECK(grid.back() == 0.0);
        for (double w : sol.w_values()) CHECK(w < 0.0);
    }
}

TEST_CASE("evenness and domain") {
    const auto sol = solve_profile(EigenSpec(2, 1, {-0.5, 0.3}));
    CHECK(sol.z(-0.3) == sol.z(0.3));
    CHECK(sol.z_prime(-0.3) == -sol.z_prime(0.3));
    CHECK_THROWS_AS(sol.z(1.01), DomainError);
    CHECK_THROWS_AS(z_eval(sol, -1.5), DomainError);
    CHECK(z_prime(sol, 0.0) == 0.0);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(solve_profile(EigenSpec(1, 1, {1.2})), PreconditionError);
    CHECK_THROWS_AS(solve_profile(EigenSpec(1, 1, {1.0})), PreconditionError);
}

TEST_CASE("ODE residual falls with the tolerance") {
    // Global error of an error-per-step controller scales like rel_tol, so a
    // single halving lands anywhere around 2x. Over ten halvings expect about
    // 1024x, allowing a factor 4 for step placement.
    auto residual_max = [](const ProfileSolution& sol) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(sol.ode_residual(0.01 + 0.99 * i / 999.0)));
        return worst;
    };
    for (const auto& spec : {EigenSpec::uniform(1, 1, -2.0), EigenSpec(2, 3, {-1.2, 0.4}),
                             EigenSpec(3, 1, {-2.5, -0.3, 0.8}), EigenSpec::uniform(1, 1, -1.0)}) {
        CAPTURE(spec.to_string());
        OdeOptions opts;
        opts.max_step = 1.0;
        opts.rel_tol = 1e-6;
        opts.abs_tol = 1e-8;
        const double coarse = residual_max(solve_profile(spec, opts));
        opts.rel_tol /= 1024.0;
        opts.abs_tol /= 1024.0;
        const double fine = residual_max(solve_profile(spec, opts));
        CHECK(coarse / fine >= 256.0);
    }
}
