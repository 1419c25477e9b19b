#include "keb/wirtinger.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "keb/error.hpp"

namespace keb {

namespace {

using cd = std::complex<double>;

// Derivatives in real coordinates x_0, y_0, x_1, y_1, ...
struct RealDerivs {
    std::vector<Eigen::MatrixXcd> first;
    std::vector<Eigen::MatrixXcd> second; // a * D + b, symmetric
};

Point shifted(const Point& z, int a, double t) {
    Point out = z;
    out(a / 2) += (a % 2 == 0) ? cd(t, 0.0) : cd(0.0, t);
    return out;
}

Eigen::MatrixXcd checked(const MatrixField& f, const Point& z) {
    Eigen::MatrixXcd v = f(z);
    if (!v.allFinite()) throw MetricError("finite differences: non-finite sample");
    return v;
}

RealDerivs real_derivs(const MatrixField& f, const Point& z, const Eigen::MatrixXcd& f0, double s, bool want_first) {
    const int D = static_cast<int>(2 * z.size());
    RealDerivs out;
    out.second.resize(static_cast<std::size_t>(D * D));
    if (want_first) out.first.resize(static_cast<std::size_t>(D));

    std::vector<Eigen::MatrixXcd> plus(static_cast<std::size_t>(D)), minus(static_cast<std::size_t>(D));
    for (int a = 0; a < D; ++a) {
        plus[a] = checked(f, shifted(z, a, s));
        minus[a] = checked(f, shifted(z, a, -s));
        if (want_first) out.first[a] = (plus[a] - minus[a]) / (2.0 * s);
        out.second[a * D + a] = (plus[a] - 2.0 * f0 + minus[a]) / (s * s);
    }
    for (int a = 0; a < D; ++a) {
        for (int b = a + 1; b < D; ++b) {
            const Point za = shifted(z, a, s);
            const Point zam = shifted(z, a, -s);
            const Eigen::MatrixXcd pp = checked(f, shifted(za, b, s));
            const Eigen::MatrixXcd pm = checked(f, shifted(za, b, -s));
            const Eigen::MatrixXcd mp = checked(f, shifted(zam, b, s));
            const Eigen::MatrixXcd mm = checked(f, shifted(zam, b, -s));
            out.second[a * D + b] = (pp - pm - mp + mm) / (4.0 * s * s);
            out.second[b * D + a] = out.second[a * D + b];
        }
    }
    return out;
}

// Eliminates the h^order error term between steps s and s/2.
void richardson(std::vector<Eigen::MatrixXcd>& coarse, const std::vector<Eigen::MatrixXcd>& fine, double order) {
    const double f = std::pow(2.0, order);
    for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = (f * fine[i] - coarse[i]) / (f - 1.0);
}

WirtingerDerivs assemble(const MatrixField& f, const Point& z, double step, bool want_first, int levels) {
    if (!(step > 0.0)) throw PreconditionError("finite differences: step must be positive");
    if (levels < 1 || levels > 4) throw PreconditionError("finite differences: levels must be in [1, 4]");
    const int n = static_cast<int>(z.size());
    const int D = 2 * n;
    WirtingerDerivs w;
    w.value = checked(f, z);
    // Neville tableau over steps s, s/2, s/4, ...
    std::vector<RealDerivs> table;
    for (int l = 0; l < levels; ++l) table.push_back(real_derivs(f, z, w.value, step / std::pow(2.0, l), want_first));
    for (int col = 1; col < levels; ++col) {
        for (int l = 0; l + col < levels; ++l) {
            richardson(table[l].second, table[l + 1].second, 2.0 * col);
            if (want_first) richardson(table[l].first, table[l + 1].first, 2.0 * col);
        }
    }
    RealDerivs& r = table.front();

    const cd I(0.0, 1.0);
    w.d.resize(static_cast<std::size_t>(n));
    w.dbar.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (want_first) {
            w.d[i] = 0.5 * (r.first[2 * i] - I * r.first[2 * i + 1]);
            w.dbar[i] = 0.5 * (r.first[2 * i] + I * r.first[2 * i + 1]);
        } else {
            w.d[i] = Eigen::MatrixXcd::Zero(w.value.rows(), w.value.cols());
            w.dbar[i] = w.d[i];
        }
    }
    w.ddbar.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto& xx = r.second[(2 * i) * D + 2 * j];
            const auto& yy = r.second[(2 * i + 1) * D + 2 * j + 1];
            const auto& xy = r.second[(2 * i) * D + 2 * j + 1];
            const auto& yx = r.second[(2 * i + 1) * D + 2 * j];
            w.ddbar[i * n + j] = 0.25 * (xx + yy + I * (xy - yx));
        }
    }
    return w;
}

} // namespace

WirtingerDerivs wirtinger_derivs(const MatrixField& f, const Point& z, double step, int levels) {
    return assemble(f, z, step, true, levels);
}

Eigen::MatrixXcd wirtinger_hessian(const ScalarField& f, const Point& z, double step, int levels) {
    const MatrixField wrapped = [&f](const Point& p) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = f(p);
        return m;
    };
    const auto w = assemble(wrapped, z, step, false, levels);
    const int n = static_cast<int>(z.size());
    Eigen::MatrixXcd out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = w.mixed(i, j)(0, 0);
    return out;
}

} // namespace keb
