#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "keb/bundle.hpp"
#include "keb/eigen_spec.hpp"
#include "keb/phi.hpp"
#include "keb/wirtinger.hpp"

namespace keb {

/// One factor (n_i, p_i) of a product of unit balls.
struct BallFactor {
    int n = 1;
    double p = 1.0;
};

/// Base manifold, fiber metric and derived eigenvalue data of a model ball bundle.
///
/// Built-in models carry analytic h, G and H = h^k together with g(0) and
/// Ric(g)(0) in a chart where h(0) = 1 and dh(0) = 0. The generic mode wraps a
/// ChartBundleMetric and obtains G by differentiating log det h numerically;
/// its results carry a relaxed tolerance.
class ModelGeometry {
public:
    /// egg(n, k, p): h = (1 - |z|^2)^{-1/p} on the unit ball of C^n, eigenvalue -p(n+1)/k
    static ModelGeometry egg(int n, int k, double p);
    /// product of unit balls with h = prod (1 - |z^i|^2)^{-1/p_i}
    static ModelGeometry product_ball(std::vector<BallFactor> factors, int k);
    /// Generic fiber metric with known constant Ricci eigenvalues of the induced base metric.
    static ModelGeometry generic(ChartBundleMetric metric, std::vector<double> eigenvalues);

    const std::string& name() const noexcept { return name_; }
    const EigenSpec& spec() const noexcept { return spec_; }
    int n() const noexcept { return spec_.n(); }
    int k() const noexcept { return spec_.k(); }
    int m() const noexcept { return spec_.m(); }
    bool is_generic() const noexcept { return generic_.has_value(); }
    /// 1e-8 for the built-in models, 1e-3 for the generic mode
    double tolerance_scale() const noexcept { return is_generic() ? 1e-3 : 1.0; }
    const std::vector<BallFactor>& factors() const noexcept { return factors_; }

    /// |w|_h with w = (z, xi); requires z inside the base domain
    double X(const Point& z, const Eigen::VectorXcd& xi) const;
    /// determinant of the fiber metric, H = det h(z)
    double H(const Point& z) const;
    /// G = det g(z) with g = d dbar log H
    double G(const Point& z) const;
    /// distance from z to the base boundary
    double base_margin(const Point& z) const;

    const Eigen::MatrixXcd& g0() const noexcept { return g0_; }
    const Eigen::MatrixXcd& ricci0() const noexcept { return ric0_; }

private:
    ModelGeometry(std::string name, EigenSpec spec);

    std::string name_;
    EigenSpec spec_;
    std::vector<BallFactor> factors_;
    std::optional<ChartBundleMetric> generic_;
    Eigen::MatrixXcd g0_;
    Eigen::MatrixXcd ric0_;
};

/// Splits a point of C^m into base and fiber parts.
std::pair<Point, Eigen::VectorXcd> split_point(const ModelGeometry& model, const Point& w);
Point join_point(const Point& z, const Eigen::VectorXcd& xi);

/// u = k^{n/(m+1)} (GH)^{-1/(m+1)} phi(X). Throws DomainError when X >= 1 or
/// z leaves the base.
double u_value(const ModelGeometry& model, const PhiProfile& profile, const Point& w);

/// Complex Hessian d^2 f / dw_s dwbar_t on C^m.
Eigen::MatrixXcd wirtinger_hessian_m(const ScalarField& f, const Point& w, double step);

/// Distance-scaled FD step: `scale` times min(1 - X, base margin).
double fd_step(const ModelGeometry& model, const Point& w, double scale);

struct MAPoint {
    Point w;
    double X = 0.0;
    double u = 0.0;
    /// |u^{m+1} det((-log u)_{s tbar}) - 1|
    double residual_log = 0.0;
    /// |(-1)^m det[[u, u_tbar], [u_s, u_{s tbar}]] - 1|
    double residual_J = 0.0;
    /// smallest eigenvalue of the FD Hessian of -log u
    double min_eig = 0.0;
    double step = 0.0;
};

/// Step relative to the boundary distance. Differences use three Richardson
/// levels, so a coarser step than plain central differences keeps roundoff
/// below 1e-9.
inline constexpr double kDefaultStepScale = 2e-2;

/// Profile resolved finely enough that second derivatives of its interpolant
/// stay below the residual thresholds (max step 1/128, rel_tol 1e-12).
PhiProfile ma_profile(const EigenSpec& spec);

MAPoint ma_residual(const ModelGeometry& model, const PhiProfile& profile, const Point& w,
                    double step_scale = kDefaultStepScale);

struct HessianBlocks {
    Eigen::MatrixXcd base;
    Eigen::MatrixXcd fiber;
    Eigen::MatrixXcd cross;
    double X = 0.0;
    double Y = 0.0;
    double Y_prime = 0.0;

    /// assembled (n+k) x (n+k) matrix
    Eigen::MatrixXcd full() const;
};

/// Block form of (-log u)_{s tbar} at the normal point w = (0, xi). Throws
/// PreconditionError for xi = 0 and DomainError for X >= 1.
HessianBlocks hessian_blocks_closed_form(const ModelGeometry& model, const PhiProfile& profile,
                                         const Eigen::VectorXcd& xi);

/// FD Hessian of -log u at (0, xi), cut into the same blocks.
HessianBlocks hessian_blocks_numeric(const ModelGeometry& model, const PhiProfile& profile,
                                     const Eigen::VectorXcd& xi, double step_scale = kDefaultStepScale);

struct CapitalPhi {
    double formula = 0.0;
    double numeric = 0.0;
};

/// P(Y) Y' / (2^{m+1} k^n X^{2k-1}) against det of the FD Hessian / (G H) at (0, xi).
/// Refuses X > 0.95 with DomainError.
CapitalPhi capital_phi_check(const ModelGeometry& model, const PhiProfile& profile, const Eigen::VectorXcd& xi,
                             double step_scale = kDefaultStepScale);

struct LowerBoundPoint {
    double X = 0.0;
    /// min eig of base block - (1 - lambda_max)/(m+1) g(0), closed form
    double min_eig = 0.0;
    /// the same with the FD base block
    double min_eig_numeric = 0.0;
};

struct LowerBoundReport {
    std::vector<LowerBoundPoint> points;
    double min_eig = 0.0;
    bool holds = false;
};

LowerBoundReport metric_lower_bound_check(const ModelGeometry& model, const PhiProfile& profile,
                                          const std::vector<Eigen::VectorXcd>& fiber_points,
                                          double step_scale = kDefaultStepScale);

struct BergmanReport {
    /// u^{-(m+1)} (1 - |z|^2 - |xi|^2)^{m+1} at each point
    std::vector<double> ratios;
    double max_deviation = 0.0;
    bool constant = false;
};

/// p = 1 egg models only; PreconditionError otherwise.
BergmanReport bergman_compare_p1(const ModelGeometry& model, const PhiProfile& profile,
                                 const std::vector<Point>& points);

/// Seeded interior points: base coordinates with uniform radii and angles,
/// X uniform in [x_min, x_max] along a random fiber direction.
std::vector<Point> sample_points(const ModelGeometry& model, int count, std::uint64_t seed, double x_min = 0.05,
                                 double x_max = 0.9);

/// Normal points (0, xi) with X spread over [x_min, x_max].
std::vector<Eigen::VectorXcd> sample_normal_fibers(const ModelGeometry& model, int count, std::uint64_t seed,
                                                   double x_min = 0.05, double x_max = 0.9);

struct MAReport {
    std::string model;
    std::string spec;
    std::uint64_t seed = 0;
    double step_scale = 0.0;
    std::vector<MAPoint> points;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    /// max |residual_log - residual_J|
    double max_identity_gap = 0.0;
    double min_eig = 0.0;
};

/// Runs ma_residual over the points on up to `threads` workers. The result
/// does not depend on the thread count.
MAReport verify_ma(const ModelGeometry& model, const PhiProfile& profile, const std::vector<Point>& points,
                   std::uint64_t seed, double step_scale = kDefaultStepScale, int threads = 1);

} // namespace keb
