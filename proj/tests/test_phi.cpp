#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "keb/error.hpp"
#include "keb/phi.hpp"

using namespace keb;

namespace {

double sup_gap_to_parabola(const PhiProfile& p, int samples = 2001) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = static_cast<double>(i) / (samples - 1);
        worst = std::max(worst, std::abs(eval_phi(p, r) - (1.0 - r * r)));
    }
    return worst;
}

} // namespace

TEST_CASE("rational example n=1 k=1 lambda=-2") {
    const PhiProfile p(solve_profile(EigenSpec::uniform(1, 1, -2.0)));
    CHECK(eval_phi(p, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(eval_phi(p, 0.5) == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(std::abs(eval_phi(p, 1.0)) <= 1e-15);
    CHECK(eval_phi_prime(p, 0.0) == 0.0);
    CHECK(eval_phi_prime(p, 0.5) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(eval_phi_prime(p, 1.0) == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(eval_Y(p, 0.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(eval_Y(p, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(eval_Y(p, 1.0), DomainError);
    CHECK(std::abs(phi_ode_residual(p, 0.0)) <= 1e-14);
    CHECK(std::abs(phi_ode_residual(p, 0.5)) <= 1e-10);
    CHECK(std::abs(phi_ode_residual(p, 1.0)) <= 1e-12);
    // Y' = -Z'/Z^2 with Z = (1-r^2)/(2+mu-mu r^2), mu = -4/3
    const double r = 0.3, mu = -4.0 / 3.0, d = 2.0 + mu - mu * r * r;
    const double zp = (-2.0 * r * d + (1.0 - r * r) * 2.0 * mu * r) / (d * d);
    const double z = (1.0 - r * r) / d;
    CHECK(eval_Y_prime(p, r) == doctest::Approx(-zp / (z * z)).epsilon(1e-9));
}

TEST_CASE("phi is 1 - r^2 in the rational cases") {
    for (auto [n, k, lambda] : {std::tuple{1, 1, -2.0}, {1, 2, -1.0}, {2, 3, -1.0}, {3, 2, -2.0}}) {
        const PhiProfile p(solve_profile(EigenSpec::uniform(n, k, lambda)));
        CAPTURE(p.spec().to_string());
        CHECK(sup_gap_to_parabola(p) <= 1e-8);
    }
}

TEST_CASE("non-rational case is visibly different") {
    const PhiProfile p(solve_profile(EigenSpec::uniform(1, 1, -1.0)));
    CHECK(sup_gap_to_parabola(p) >= 1e-3);
}

TEST_CASE("endpoint data, identities and residuals over mixed specs") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> eig(-3.0, 0.9);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = dim(rng), k = dim(rng);
        std::vector<double> ev(static_cast<std::size_t>(n));
        for (double& v : ev) v = eig(rng);
        const PhiProfile p(solve_profile(EigenSpec(n, k, ev)));
        CAPTURE(p.spec().to_string());
        CHECK(std::abs(eval_phi(p, 1.0)) <= 1e-10);
        CHECK(std::abs(eval_phi_prime(p, 1.0) + 2.0) <= 1e-6);
        const double nu = p.spec().nu();
        for (int i = 0; i <= 100; ++i) {
            const double r = i / 100.0;
            const double phi = eval_phi(p, r);
            if (r < 1.0) CHECK(phi > 0.0);
            CHECK(std::abs(phi_ode_residual(p, r)) <= 1e-8 * std::max(1.0, phi));
            if (r >= 0.01 && r <= 0.99) {
                const double y = eval_Y(p, r);
                CHECK(std::abs(y - (nu - r * eval_phi_prime(p, r) / phi)) <= 1e-9 * std::max(1.0, y));
                CHECK(y * p.solution().z(r) == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(y >= nu * (1.0 - 1e-14));
            }
        }
        // both regular forms of phi' meet at r = 1/2
        const double below = eval_phi_prime(p, 0.5);
        const double above = eval_phi_prime(p, std::nextafter(0.5, 1.0));
        CHECK(below == doctest::Approx(above).epsilon(1e-9));
    }
}

TEST_CASE("evenness and sample cache") {
    const PhiProfile p(solve_profile(EigenSpec(2, 2, {-1.0, 0.5})), 11);
    CHECK(eval_phi(p, -0.4) == eval_phi(p, 0.4));
    CHECK(eval_phi_prime(p, -0.4) == -eval_phi_prime(p, 0.4));
    REQUIRE(p.sample_radii().size() == 11);
    CHECK(p.sample_radii().back() == 1.0);
    CHECK(std::isinf(p.sample_Y().back()));
    CHECK(p.sample_phi()[5] == eval_phi(p, 0.5));
    CHECK_THROWS_AS(eval_phi(p, 1.2), DomainError);
}
