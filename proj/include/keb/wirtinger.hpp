#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace keb {

/// Point of C^n.
using Point = Eigen::VectorXcd;
using MatrixField = std::function<Eigen::MatrixXcd(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// First and mixed second Wirtinger derivatives of a matrix field at a point.
struct WirtingerDerivs {
    Eigen::MatrixXcd value;
    /// d/dz_i
    std::vector<Eigen::MatrixXcd> d;
    /// d/dzbar_j
    std::vector<Eigen::MatrixXcd> dbar;
    /// d^2/dz_i dzbar_j, stored at i * n + j
    std::vector<Eigen::MatrixXcd> ddbar;

    const Eigen::MatrixXcd& mixed(int i, int j) const { return ddbar[static_cast<std::size_t>(i * dim() + j)]; }
    int dim() const noexcept { return static_cast<int>(d.size()); }
};

/// Central differences in the 2n real coordinates, Richardson-extrapolated
/// over `levels` steps s, s/2, ..., assembled with d/dz = (d/dx - i d/dy)/2.
/// Two levels give fourth order, three give sixth order. Throws MetricError
/// when a sample is not finite.
WirtingerDerivs wirtinger_derivs(const MatrixField& f, const Point& z, double step, int levels = 2);

/// n x n matrix of d^2 f/dz_i dzbar_j for a real scalar field.
Eigen::MatrixXcd wirtinger_hessian(const ScalarField& f, const Point& z, double step, int levels = 2);

} // namespace keb
