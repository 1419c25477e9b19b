#include "keb/ma_verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "keb/error.hpp"
#include "keb/random.hpp"

namespace keb {

namespace {

using cd = std::complex<double>;

constexpr double kCapitalPhiMaxX = 0.95;
constexpr double kBaseRadius = 0.5;
constexpr int kFdLevels = 3;

std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

int total_dim(const std::vector<BallFactor>& factors) {
    int n = 0;
    for (const auto& f : factors) n += f.n;
    return n;
}

std::vector<double> product_eigenvalues(const std::vector<BallFactor>& factors, int k) {
    std::vector<double> ev;
    for (const auto& f : factors)
        for (int i = 0; i < f.n; ++i) ev.push_back(-f.p * (f.n + 1) / k);
    return ev;
}

double min_hermitian_eig(const Eigen::MatrixXcd& a) {
    const Eigen::MatrixXcd sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::VectorXcd random_direction(SampleRng& rng, int dim) {
    Eigen::VectorXcd v(dim);
    do {
        for (int i = 0; i < dim; ++i) v(i) = std::polar(rng.uniform(), 2.0 * M_PI * rng.uniform());
    } while (v.norm() < 1e-3);
    return v / v.norm();
}

Point sample_base(const ModelGeometry& model, SampleRng& rng) {
    Point z(model.n());
    if (model.is_generic()) {
        const double reach = kBaseRadius * std::min(1.0, model.base_margin(Point::Zero(model.n())));
        for (int i = 0; i < model.n(); ++i)
            z(i) = std::polar(rng.uniform() * reach / std::sqrt(model.n()), 2.0 * M_PI * rng.uniform());
        return z;
    }
    int offset = 0;
    for (const auto& f : model.factors()) {
        for (int i = 0; i < f.n; ++i)
            z(offset + i) = std::polar(rng.uniform() * kBaseRadius / std::sqrt(f.n), 2.0 * M_PI * rng.uniform());
        offset += f.n;
    }
    return z;
}

Eigen::VectorXcd scaled_fiber(const ModelGeometry& model, const Point& z, SampleRng& rng, double x) {
    const Eigen::VectorXcd dir = random_direction(rng, model.k());
    return dir * (x / model.X(z, dir));
}

} // namespace

ModelGeometry::ModelGeometry(std::string name, EigenSpec spec) : name_(std::move(name)), spec_(std::move(spec)) {}

ModelGeometry ModelGeometry::egg(int n, int k, double p) {
    if (n < 1 || k < 1) throw PreconditionError("egg: n and k must be at least 1");
    if (!(p > 0.0) || !std::isfinite(p)) throw PreconditionError("egg: p must be positive");
    ModelGeometry out = product_ball({BallFactor{n, p}}, k);
    out.name_ = "egg(" + std::to_string(n) + "," + std::to_string(k) + "," + format_double(p) + ")";
    return out;
}

ModelGeometry ModelGeometry::product_ball(std::vector<BallFactor> factors, int k) {
    if (factors.empty()) throw PreconditionError("product_ball: no factors");
    if (k < 1) throw PreconditionError("product_ball: k must be at least 1");
    for (const auto& f : factors)
        if (f.n < 1 || !(f.p > 0.0) || !std::isfinite(f.p))
            throw PreconditionError("product_ball: each factor needs n >= 1 and p > 0");
    std::string name = "product_ball([";
    for (std::size_t i = 0; i < factors.size(); ++i)
        name += (i ? ",(" : "(") + std::to_string(factors[i].n) + "," + format_double(factors[i].p) + ")";
    name += "]," + std::to_string(k) + ")";

    ModelGeometry out(std::move(name), EigenSpec(total_dim(factors), k, product_eigenvalues(factors, k)));
    const int n = out.n();
    out.g0_ = Eigen::MatrixXcd::Zero(n, n);
    out.ric0_ = Eigen::MatrixXcd::Zero(n, n);
    int offset = 0;
    for (const auto& f : factors) {
        for (int i = 0; i < f.n; ++i) {
            out.g0_(offset + i, offset + i) = k / f.p;
            out.ric0_(offset + i, offset + i) = -(f.n + 1.0);
        }
        offset += f.n;
    }
    out.factors_ = std::move(factors);
    return out;
}

ModelGeometry ModelGeometry::generic(ChartBundleMetric metric, std::vector<double> eigenvalues) {
    ModelGeometry out("generic", EigenSpec(metric.n, metric.k, std::move(eigenvalues)));
    const Point origin = Point::Zero(metric.n);
    if (!metric.contains(origin)) throw PreconditionError("generic model: chart must contain the origin");
    const double step = 1e-3 * std::min(1.0, metric.boundary_distance(origin));
    out.g0_ = induced_base_metric(metric, origin, step).g;
    out.ric0_ = Eigen::MatrixXcd::Zero(metric.n, metric.n);
    out.generic_ = std::move(metric);
    return out;
}

double ModelGeometry::base_margin(const Point& z) const {
    if (z.size() != n()) throw PreconditionError("point dimension does not match the base dimension");
    if (generic_) return generic_->boundary_distance(z);
    double margin = std::numeric_limits<double>::infinity();
    int offset = 0;
    for (const auto& f : factors_) {
        margin = std::min(margin, 1.0 - z.segment(offset, f.n).norm());
        offset += f.n;
    }
    return margin;
}

double ModelGeometry::X(const Point& z, const Eigen::VectorXcd& xi) const {
    if (xi.size() != k()) throw PreconditionError("fiber dimension does not match the rank");
    if (!(base_margin(z) > 0.0)) throw DomainError("base point outside the domain");
    if (generic_) {
        const Eigen::MatrixXcd h = generic_->h(z);
        return std::sqrt(std::max(0.0, (xi.transpose() * h * xi.conjugate())(0, 0).real()));
    }
    double log_h = 0.0;
    int offset = 0;
    for (const auto& f : factors_) {
        log_h -= std::log1p(-z.segment(offset, f.n).squaredNorm()) / f.p;
        offset += f.n;
    }
    return xi.norm() * std::exp(0.5 * log_h);
}

double ModelGeometry::H(const Point& z) const {
    if (!(base_margin(z) > 0.0)) throw DomainError("base point outside the domain");
    if (generic_) return generic_->h(z).determinant().real();
    double log_h = 0.0;
    int offset = 0;
    for (const auto& f : factors_) {
        log_h -= std::log1p(-z.segment(offset, f.n).squaredNorm()) / f.p;
        offset += f.n;
    }
    return std::exp(k() * log_h);
}

double ModelGeometry::G(const Point& z) const {
    const double margin = base_margin(z);
    if (!(margin > 0.0)) throw DomainError("base point outside the domain");
    if (generic_) return induced_base_metric(*generic_, z, 1e-3 * std::min(1.0, margin)).G;
    double log_g = 0.0;
    int offset = 0;
    for (const auto& f : factors_) {
        log_g += f.n * std::log(k() / f.p) - (f.n + 1) * std::log1p(-z.segment(offset, f.n).squaredNorm());
        offset += f.n;
    }
    return std::exp(log_g);
}

std::pair<Point, Eigen::VectorXcd> split_point(const ModelGeometry& model, const Point& w) {
    if (w.size() != model.m()) throw PreconditionError("point dimension does not match n + k");
    return {w.head(model.n()), w.tail(model.k())};
}

Point join_point(const Point& z, const Eigen::VectorXcd& xi) {
    Point w(z.size() + xi.size());
    w << z, xi;
    return w;
}

double u_value(const ModelGeometry& model, const PhiProfile& profile, const Point& w) {
    const auto [z, xi] = split_point(model, w);
    const double x = model.X(z, xi);
    if (!(x < 1.0)) throw DomainError("point outside the ball bundle");
    const int m = model.m();
    const double log_u = model.n() * std::log(model.k()) / (m + 1) -
                         std::log(model.G(z) * model.H(z)) / (m + 1);
    return std::exp(log_u) * eval_phi(profile, x);
}

PhiProfile ma_profile(const EigenSpec& spec) {
    OdeOptions options;
    options.max_step = 1.0 / 128.0;
    options.rel_tol = 1e-12;
    options.abs_tol = 1e-14;
    return PhiProfile(solve_profile(spec, options));
}

Eigen::MatrixXcd wirtinger_hessian_m(const ScalarField& f, const Point& w, double step) {
    return wirtinger_hessian(f, w, step, kFdLevels);
}

double fd_step(const ModelGeometry& model, const Point& w, double scale) {
    const auto [z, xi] = split_point(model, w);
    const double d = std::min({1.0, 1.0 - model.X(z, xi), model.base_margin(z)});
    if (!(d > 0.0)) throw DomainError("point outside the ball bundle");
    return scale * d;
}

MAPoint ma_residual(const ModelGeometry& model, const PhiProfile& profile, const Point& w, double step_scale) {
    if (profile.spec().to_string() != model.spec().to_string())
        throw PreconditionError("profile was solved for a different spec");
    MAPoint out;
    out.w = w;
    const auto [z, xi] = split_point(model, w);
    out.X = model.X(z, xi);
    out.step = fd_step(model, w, step_scale);
    out.u = u_value(model, profile, w);
    const int m = model.m();

    const ScalarField neg_log_u = [&](const Point& p) { return -std::log(u_value(model, profile, p)); };
    const Eigen::MatrixXcd hess = wirtinger_hessian_m(neg_log_u, w, out.step);
    out.min_eig = min_hermitian_eig(hess);
    out.residual_log = std::abs(std::pow(out.u, m + 1) * hess.determinant().real() - 1.0);

    const MatrixField u_field = [&](const Point& p) {
        Eigen::MatrixXcd v(1, 1);
        v(0, 0) = u_value(model, profile, p);
        return v;
    };
    const auto d = wirtinger_derivs(u_field, w, out.step, kFdLevels);
    Eigen::MatrixXcd border(m + 1, m + 1);
    border(0, 0) = d.value(0, 0);
    for (int s = 0; s < m; ++s) {
        border(0, s + 1) = d.dbar[s](0, 0);
        border(s + 1, 0) = d.d[s](0, 0);
        for (int t = 0; t < m; ++t) border(s + 1, t + 1) = d.mixed(s, t)(0, 0);
    }
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    out.residual_J = std::abs(sign * border.determinant().real() - 1.0);
    return out;
}

Eigen::MatrixXcd HessianBlocks::full() const {
    const auto n = base.rows();
    const auto k = fiber.rows();
    Eigen::MatrixXcd out(n + k, n + k);
    out.topLeftCorner(n, n) = base;
    out.topRightCorner(n, k) = cross;
    out.bottomLeftCorner(k, n) = cross.adjoint();
    out.bottomRightCorner(k, k) = fiber;
    return out;
}

HessianBlocks hessian_blocks_closed_form(const ModelGeometry& model, const PhiProfile& profile,
                                         const Eigen::VectorXcd& xi) {
    if (model.is_generic()) throw PreconditionError("closed-form blocks need a built-in model");
    if (xi.size() != model.k()) throw PreconditionError("fiber dimension does not match the rank");
    if (xi.norm() == 0.0) throw PreconditionError("fiber formula is singular at xi = 0");
    const int n = model.n();
    const int k = model.k();
    const int m = model.m();
    HessianBlocks b;
    b.X = model.X(Point::Zero(n), xi);
    if (!(b.X < 1.0)) throw DomainError("point outside the ball bundle");
    b.Y = eval_Y(profile, b.X);
    b.Y_prime = eval_Y_prime(profile, b.X);

    b.base = -model.ricci0() / (m + 1.0) + (b.Y / (2.0 * k)) * model.g0();
    const double x2 = b.X * b.X;
    const double radial = b.X * b.Y_prime / 4.0 - b.Y / 2.0 + k / (m + 1.0);
    b.fiber = ((b.Y - model.spec().nu()) / (2.0 * x2)) * Eigen::MatrixXcd::Identity(k, k) +
              (radial / (x2 * x2)) * (xi.conjugate() * xi.transpose());
    b.cross = Eigen::MatrixXcd::Zero(n, k);
    return b;
}

HessianBlocks hessian_blocks_numeric(const ModelGeometry& model, const PhiProfile& profile,
                                     const Eigen::VectorXcd& xi, double step_scale) {
    const int n = model.n();
    const int k = model.k();
    const Point w = join_point(Point::Zero(n), xi);
    const ScalarField neg_log_u = [&](const Point& p) { return -std::log(u_value(model, profile, p)); };
    const Eigen::MatrixXcd hess = wirtinger_hessian_m(neg_log_u, w, fd_step(model, w, step_scale));
    HessianBlocks b;
    b.X = model.X(Point::Zero(n), xi);
    b.base = hess.topLeftCorner(n, n);
    b.fiber = hess.bottomRightCorner(k, k);
    b.cross = hess.topRightCorner(n, k);
    if (b.X > 0.0 && b.X < 1.0) {
        b.Y = eval_Y(profile, b.X);
        b.Y_prime = eval_Y_prime(profile, b.X);
    }
    return b;
}

CapitalPhi capital_phi_check(const ModelGeometry& model, const PhiProfile& profile, const Eigen::VectorXcd& xi,
                             double step_scale) {
    const int n = model.n();
    const int k = model.k();
    const int m = model.m();
    const Point origin = Point::Zero(n);
    const double x = model.X(origin, xi);
    if (x > kCapitalPhiMaxX) throw DomainError("capital phi check refuses X > 0.95");
    if (!(x > 0.0)) throw PreconditionError("capital phi check needs xi != 0");
    CapitalPhi out;
    const double y = eval_Y(profile, x);
    const double yp = eval_Y_prime(profile, x);
    out.formula = profile.solution().P()(y) * yp /
                  (std::pow(2.0, m + 1) * std::pow(static_cast<double>(k), n) * std::pow(x, 2 * k - 1));
    const auto numeric = hessian_blocks_numeric(model, profile, xi, step_scale);
    out.numeric = numeric.full().determinant().real() / (model.G(origin) * model.H(origin));
    return out;
}

LowerBoundReport metric_lower_bound_check(const ModelGeometry& model, const PhiProfile& profile,
                                          const std::vector<Eigen::VectorXcd>& fiber_points, double step_scale) {
    const double c = (1.0 - model.spec().lambda_max()) / (model.m() + 1.0);
    LowerBoundReport out;
    out.min_eig = std::numeric_limits<double>::infinity();
    for (const auto& xi : fiber_points) {
        LowerBoundPoint p;
        const auto closed = hessian_blocks_closed_form(model, profile, xi);
        const auto numeric = hessian_blocks_numeric(model, profile, xi, step_scale);
        p.X = closed.X;
        p.min_eig = min_hermitian_eig(closed.base - c * model.g0());
        p.min_eig_numeric = min_hermitian_eig(numeric.base - c * model.g0());
        out.min_eig = std::min(out.min_eig, p.min_eig);
        out.points.push_back(p);
    }
    out.holds = out.min_eig >= -1e-8;
    return out;
}

BergmanReport bergman_compare_p1(const ModelGeometry& model, const PhiProfile& profile,
                                 const std::vector<Point>& points) {
    if (model.is_generic() || model.factors().size() != 1 || model.factors().front().p != 1.0)
        throw PreconditionError("Bergman comparison is only available for egg models with p = 1");
    const int m = model.m();
    BergmanReport out;
    for (const auto& w : points) {
        const auto [z, xi] = split_point(model, w);
        const double defining = 1.0 - z.squaredNorm() - xi.squaredNorm();
        const double ratio = std::pow(defining / u_value(model, profile, w), m + 1);
        out.ratios.push_back(ratio);
        out.max_deviation = std::max(out.max_deviation, std::abs(ratio - 1.0));
    }
    out.constant = out.max_deviation <= 1e-8;
    return out;
}

std::vector<Point> sample_points(const ModelGeometry& model, int count, std::uint64_t seed, double x_min,
                                 double x_max) {
    if (count < 0 || !(0.0 <= x_min && x_min <= x_max && x_max < 1.0))
        throw PreconditionError("sample_points: need count >= 0 and 0 <= x_min <= x_max < 1");
    SampleRng rng(seed);
    std::vector<Point> out;
    for (int i = 0; i < count; ++i) {
        const Point z = sample_base(model, rng);
        const double x = rng.uniform(x_min, x_max);
        out.push_back(join_point(z, scaled_fiber(model, z, rng, x)));
    }
    return out;
}

std::vector<Eigen::VectorXcd> sample_normal_fibers(const ModelGeometry& model, int count, std::uint64_t seed,
                                                   double x_min, double x_max) {
    if (count < 1 || !(0.0 < x_min && x_min <= x_max && x_max < 1.0))
        throw PreconditionError("sample_normal_fibers: need count >= 1 and 0 < x_min <= x_max < 1");
    SampleRng rng(seed);
    const Point origin = Point::Zero(model.n());
    std::vector<Eigen::VectorXcd> out;
    for (int i = 0; i < count; ++i) {
        const double x = count == 1 ? x_min : x_min + (x_max - x_min) * i / (count - 1);
        out.push_back(scaled_fiber(model, origin, rng, x));
    }
    return out;
}

MAReport verify_ma(const ModelGeometry& model, const PhiProfile& profile, const std::vector<Point>& points,
                   std::uint64_t seed, double step_scale, int threads) {
    MAReport report;
    report.model = model.name();
    report.spec = model.spec().to_string();
    report.seed = seed;
    report.step_scale = step_scale;
    report.points.resize(points.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                report.points[i] = ma_residual(model, profile, points[i], step_scale);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, points.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    // sequential reduction keeps the sums independent of the thread count
    double sum = 0.0;
    report.min_eig = std::numeric_limits<double>::infinity();
    for (const auto& p : report.points) {
        const double r = std::max(p.residual_log, p.residual_J);
        report.max_residual = std::max(report.max_residual, r);
        sum += r;
        report.max_identity_gap = std::max(report.max_identity_gap, std::abs(p.residual_log - p.residual_J));
        report.min_eig = std::min(report.min_eig, p.min_eig);
    }
    if (!points.empty()) report.mean_residual = sum / static_cast<double>(points.size());
    return report;
}

} // namespace keb
