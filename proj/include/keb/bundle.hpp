#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "keb/wirtinger.hpp"

namespace keb {

/// Hermitian metric h_{a bbar}(z) on the trivialised bundle C^k over a chart
/// of C^n.
struct ChartBundleMetric {
    int n = 1;
    int k = 1;
    MatrixField h;
    /// distance from z to the chart boundary, positive inside; +inf for C^n
    ScalarField boundary_distance;
    /// label compared by direct_sum
    std::string domain;

    bool contains(const Point& z) const { return boundary_distance(z) > 0.0; }
};

/// Chern curvature Theta_{a bbar i jbar} at a point, with the metric there.
struct CurvatureTensor {
    int n = 0;
    int k = 0;
    Eigen::MatrixXcd h;
    /// k x k block for (i, j), stored at i * n + j
    std::vector<Eigen::MatrixXcd> theta;

    const Eigen::MatrixXcd& block(int i, int j) const { return theta[static_cast<std::size_t>(i * n + j)]; }
    std::complex<double> operator()(int a, int b, int i, int j) const { return block(i, j)(a, b); }

    /// max |Theta_{a bbar i jbar} - conj(Theta_{b abar j ibar})|
    double hermitian_defect() const;
};

/// Theta_ij = -d_i dbar_j h + (d_i h) h^{-1} (dbar_j h). Throws DomainError
/// when z is closer than 2 step to the boundary and MetricError when h is not
/// positive definite.
CurvatureTensor chern_curvature(const ChartBundleMetric& metric, const Point& z, double step = 1e-3);

/// R_{i jbar} = h^{a bbar} Theta_{a bbar i jbar}
Eigen::MatrixXcd bundle_ricci(const CurvatureTensor& theta);

/// max |Theta_{a bbar i jbar} - h_{a bbar} R_{i jbar} / k|
double split_residual(const ChartBundleMetric& metric, const Point& z, double step = 1e-3);

struct GriffithsSample {
    double min_value = 0.0;
    double max_value = 0.0;
    int evaluated = 0;
    /// every sampled value below -1e-10; evidence, not a proof
    bool negative_evidence = false;
    std::uint64_t seed = 0;
};

/// Evaluates Theta(xi, xibar, v, vbar) on `trials` seeded unit pairs plus all
/// coordinate-axis pairs.
GriffithsSample griffiths_negativity_sample(const ChartBundleMetric& metric, const Point& z, double step, int trials,
                                            std::uint64_t seed);

struct InducedMetric {
    Eigen::MatrixXcd g;
    double G = 0.0;
};

/// g = d dbar log det h and G = det g. Throws MetricError when g is not
/// positive definite (the bundle is not negative there).
InducedMetric induced_base_metric(const ChartBundleMetric& metric, const Point& z, double step = 1e-3);

struct RicciEigenReport {
    /// ascending eigenvalues of Ric(g) g^{-1} at each point
    std::vector<std::vector<double>> eigenvalues;
    /// max over eigenvalue index of the point-to-point spread
    double spread = 0.0;
    double tolerance = 0.0;
    bool constant = false;
};

/// Ric(g) = -d dbar log G by nested differences. Both steps scale with the
/// boundary distance d (capped at 1): the outer one is 1e-2 d and the inner
/// one `step` d. Fourth derivatives amplify roundoff, so the inner default is
/// coarser than for single differentiation.
RicciEigenReport ricci_eigenvalues(const ChartBundleMetric& metric, const std::vector<Point>& points,
                                   double step = 1e-2, double tolerance = 1e-4);

/// Block-diagonal sum of line bundles over the same chart. Throws
/// PreconditionError on rank or base-dimension mismatch and on different domains.
ChartBundleMetric direct_sum(const std::vector<ChartBundleMetric>& lines);

/// (1 - |z|^2)^{-p} on the unit ball of C^n
ChartBundleMetric disk_power_line(int n, double p);
/// identity metric of rank k on C^n
ChartBundleMetric flat_bundle(int n, int k);
/// e^{|z|^2} on C^n
ChartBundleMetric exp_potential_line(int n);
/// (1 + |z|^2)^{-1} on C^n, Griffiths positive
ChartBundleMetric positive_line(int n);

/// h = exp(psi/k) I_k with log det h = psi = Re sum c_IJ z^I zbar^J, read from
/// the JSON text {"n", "k", "terms": [{"i_multi", "j_multi", "re", "im"}]}.
/// Throws PreconditionError on malformed input.
ChartBundleMetric polynomial_potential_metric(std::string_view json_text);

} // namespace keb
