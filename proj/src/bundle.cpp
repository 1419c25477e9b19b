#include "keb/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <json.hpp>

#include "keb/error.hpp"
#include "keb/random.hpp"

namespace keb {

namespace {

using cd = std::complex<double>;

constexpr double kGriffithsThreshold = -1e-10;

Eigen::LLT<Eigen::MatrixXcd> checked_cholesky(const Eigen::MatrixXcd& h, const char* what) {
    Eigen::LLT<Eigen::MatrixXcd> llt(h);
    if (llt.info() != Eigen::Success) throw MetricError(std::string(what) + ": matrix is not positive definite");
    return llt;
}

double log_det_pd(const Eigen::MatrixXcd& h, const char* what) {
    const auto llt = checked_cholesky(h, what);
    double s = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) s += std::log(llt.matrixL()(i, i).real());
    return 2.0 * s;
}

void check_margin(const ChartBundleMetric& metric, const Point& z, double step) {
    if (z.size() != metric.n) throw PreconditionError("point dimension does not match the base dimension");
    if (!(metric.boundary_distance(z) >= 2.0 * step))
        throw DomainError("point lies within two steps of the chart boundary");
}

Eigen::VectorXcd random_unit(SampleRng& rng, int dim) {
    Eigen::VectorXcd v(dim);
    do {
        for (int i = 0; i < dim; ++i) v(i) = cd(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    } while (v.norm() < 1e-3);
    return v / v.norm();
}

double quartic(const CurvatureTensor& t, const Eigen::VectorXcd& xi, const Eigen::VectorXcd& v) {
    cd sum = 0.0;
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) sum += v(i) * std::conj(v(j)) * (xi.transpose() * t.block(i, j) * xi.conjugate())(0, 0);
    return sum.real();
}

double norm2(const Point& z) { return z.squaredNorm(); }

ChartBundleMetric unit_ball_line(int n, std::function<double(double)> of_norm2) {
    if (n < 1) throw PreconditionError("base dimension must be at least 1");
    ChartBundleMetric m;
    m.n = n;
    m.k = 1;
    m.h = [f = std::move(of_norm2)](const Point& z) {
        Eigen::MatrixXcd h(1, 1);
        h(0, 0) = f(norm2(z));
        return h;
    };
    m.boundary_distance = [](const Point& z) { return 1.0 - z.norm(); };
    m.domain = "unit-ball(" + std::to_string(n) + ")";
    return m;
}

ChartBundleMetric whole_space_line(int n, std::function<double(double)> of_norm2) {
    auto m = unit_ball_line(n, std::move(of_norm2));
    m.boundary_distance = [](const Point&) { return std::numeric_limits<double>::infinity(); };
    m.domain = "C^" + std::to_string(n);
    return m;
}

} // namespace

double CurvatureTensor::hermitian_defect() const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) worst = std::max(worst, (block(i, j) - block(j, i).adjoint()).cwiseAbs().maxCoeff());
    return worst;
}

CurvatureTensor chern_curvature(const ChartBundleMetric& metric, const Point& z, double step) {
    check_margin(metric, z, step);
    const auto w = wirtinger_derivs(metric.h, z, step);
    const auto llt = checked_cholesky(w.value, "chern_curvature");
    CurvatureTensor t;
    t.n = metric.n;
    t.k = metric.k;
    t.h = w.value;
    t.theta.resize(static_cast<std::size_t>(t.n * t.n));
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) t.theta[i * t.n + j] = -w.mixed(i, j) + w.d[i] * llt.solve(w.dbar[j]);
    return t;
}

Eigen::MatrixXcd bundle_ricci(const CurvatureTensor& theta) {
    const Eigen::MatrixXcd h_inv = theta.h.inverse();
    Eigen::MatrixXcd r(theta.n, theta.n);
    for (int i = 0; i < theta.n; ++i)
        for (int j = 0; j < theta.n; ++j) r(i, j) = (h_inv * theta.block(i, j)).trace();
    return r;
}

double split_residual(const ChartBundleMetric& metric, const Point& z, double step) {
    const auto t = chern_curvature(metric, z, step);
    const auto r = bundle_ricci(t);
    double worst = 0.0;
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j)
            worst = std::max(worst, (t.block(i, j) - t.h * (r(i, j) / static_cast<double>(t.k))).cwiseAbs().maxCoeff());
    return worst;
}

GriffithsSample griffiths_negativity_sample(const ChartBundleMetric& metric, const Point& z, double step, int trials,
                                            std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("griffiths_negativity_sample: trials must be at least 1");
    const auto t = chern_curvature(metric, z, step);
    GriffithsSample out;
    out.seed = seed;
    out.min_value = std::numeric_limits<double>::infinity();
    out.max_value = -std::numeric_limits<double>::infinity();
    auto record = [&out](double q) {
        out.min_value = std::min(out.min_value, q);
        out.max_value = std::max(out.max_value, q);
        ++out.evaluated;
    };
    for (int a = 0; a < t.k; ++a)
        for (int i = 0; i < t.n; ++i)
            record(quartic(t, Eigen::VectorXcd::Unit(t.k, a), Eigen::VectorXcd::Unit(t.n, i)));
    SampleRng rng(seed);
    for (int s = 0; s < trials; ++s) {
        const auto xi = random_unit(rng, t.k);
        const auto v = random_unit(rng, t.n);
        record(quartic(t, xi, v));
    }
    out.negative_evidence = out.max_value < kGriffithsThreshold;
    return out;
}

InducedMetric induced_base_metric(const ChartBundleMetric& metric, const Point& z, double step) {
    check_margin(metric, z, step);
    const ScalarField log_h = [&metric](const Point& p) { return log_det_pd(metric.h(p), "induced_base_metric"); };
    InducedMetric out;
    out.g = wirtinger_hessian(log_h, z, step);
    out.g = 0.5 * (out.g + out.g.adjoint()).eval();
    try {
        const auto llt = checked_cholesky(out.g, "induced_base_metric");
        double det = 1.0;
        for (Eigen::Index i = 0; i < out.g.rows(); ++i) det *= std::norm(llt.matrixL()(i, i));
        out.G = det;
    } catch (const MetricError&) {
        throw MetricError("induced_base_metric: d dbar log det h is not positive definite; the bundle is not negative here");
    }
    return out;
}

RicciEigenReport ricci_eigenvalues(const ChartBundleMetric& metric, const std::vector<Point>& points, double step,
                                   double tolerance) {
    RicciEigenReport report;
    report.tolerance = tolerance;
    for (const auto& z : points) {
        const double scale = std::min(1.0, metric.boundary_distance(z));
        const double outer = 1e-2 * scale;
        const double inner = step * scale;
        check_margin(metric, z, outer + inner);
        const ScalarField log_G = [&](const Point& p) { return std::log(induced_base_metric(metric, p, inner).G); };
        Eigen::MatrixXcd ric = -wirtinger_hessian(log_G, z, outer);
        ric = 0.5 * (ric + ric.adjoint()).eval();
        const auto g = induced_base_metric(metric, z, inner).g;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ric, g);
        if (solver.info() != Eigen::Success) throw MetricError("ricci_eigenvalues: eigen solver failed");
        const Eigen::VectorXd ev = solver.eigenvalues();
        report.eigenvalues.emplace_back(ev.data(), ev.data() + ev.size());
    }
    if (!report.eigenvalues.empty()) {
        const std::size_t count = report.eigenvalues.front().size();
        for (std::size_t e = 0; e < count; ++e) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto& row : report.eigenvalues) {
                lo = std::min(lo, row[e]);
                hi = std::max(hi, row[e]);
            }
            report.spread = std::max(report.spread, hi - lo);
        }
    }
    report.constant = report.spread <= tolerance;
    return report;
}

ChartBundleMetric direct_sum(const std::vector<ChartBundleMetric>& lines) {
    if (lines.empty()) throw PreconditionError("direct_sum: no summands");
    for (const auto& l : lines) {
        if (l.k != 1) throw PreconditionError("direct_sum: summands must be line bundles");
        if (l.n != lines.front().n) throw PreconditionError("direct_sum: base dimensions differ");
        if (l.domain != lines.front().domain) throw PreconditionError("direct_sum: domains differ");
    }
    ChartBundleMetric m;
    m.n = lines.front().n;
    m.k = static_cast<int>(lines.size());
    m.domain = lines.front().domain;
    m.boundary_distance = lines.front().boundary_distance;
    m.h = [lines](const Point& z) {
        const auto k = static_cast<Eigen::Index>(lines.size());
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(k, k);
        for (Eigen::Index a = 0; a < k; ++a) h(a, a) = lines[static_cast<std::size_t>(a)].h(z)(0, 0);
        return h;
    };
    return m;
}

ChartBundleMetric disk_power_line(int n, double p) {
    return unit_ball_line(n, [p](double s) { return std::pow(1.0 - s, -p); });
}

ChartBundleMetric flat_bundle(int n, int k) {
    if (n < 1 || k < 1) throw PreconditionError("flat_bundle: dimensions must be at least 1");
    ChartBundleMetric m;
    m.n = n;
    m.k = k;
    m.h = [k](const Point&) { return Eigen::MatrixXcd::Identity(k, k).eval(); };
    m.boundary_distance = [](const Point&) { return std::numeric_limits<double>::infinity(); };
    m.domain = "C^" + std::to_string(n);
    return m;
}

ChartBundleMetric exp_potential_line(int n) {
    return whole_space_line(n, [](double s) { return std::exp(s); });
}

ChartBundleMetric positive_line(int n) {
    return whole_space_line(n, [](double s) { return 1.0 / (1.0 + s); });
}

ChartBundleMetric polynomial_potential_metric(std::string_view json_text) {
    struct Term {
        std::vector<int> i_multi;
        std::vector<int> j_multi;
        cd c;
    };
    int n = 0, k = 0;
    std::vector<Term> terms;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        n = doc.at("n").get<int>();
        k = doc.at("k").get<int>();
        if (n < 1 || k < 1) throw PreconditionError("polynomial potential: n and k must be at least 1");
        for (const auto& t : doc.at("terms")) {
            Term term{t.at("i_multi").get<std::vector<int>>(), t.at("j_multi").get<std::vector<int>>(),
                      cd(t.value("re", 0.0), t.value("im", 0.0))};
            const auto ok = [n](const std::vector<int>& mi) {
                return static_cast<int>(mi.size()) == n && std::all_of(mi.begin(), mi.end(), [](int e) { return e >= 0; });
            };
            if (!ok(term.i_multi) || !ok(term.j_multi))
                throw PreconditionError("polynomial potential: multi-indices must have n nonnegative entries");
            terms.push_back(std::move(term));
        }
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("polynomial potential: ") + e.what());
    }
    ChartBundleMetric m;
    m.n = n;
    m.k = k;
    m.domain = "C^" + std::to_string(n);
    m.boundary_distance = [](const Point&) { return std::numeric_limits<double>::infinity(); };
    m.h = [terms, k](const Point& z) {
        cd psi = 0.0;
        for (const auto& t : terms) {
            cd mono = t.c;
            for (Eigen::Index i = 0; i < z.size(); ++i)
                mono *= std::pow(z(i), t.i_multi[static_cast<std::size_t>(i)]) *
                        std::pow(std::conj(z(i)), t.j_multi[static_cast<std::size_t>(i)]);
            psi += mono;
        }
        return (Eigen::MatrixXcd::Identity(k, k) * std::exp(psi.real() / k)).eval();
    };
    return m;
}

} // namespace keb
