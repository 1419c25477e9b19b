#include "keb/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "keb/error.hpp"

namespace keb {

RealPolynomial::RealPolynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }

RealPolynomial::RealPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void RealPolynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double RealPolynomial::scale() const noexcept {
    double s = 0.0;
    for (double c : coeffs_) s = std::max(s, std::abs(c));
    return s;
}

double RealPolynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

RealPolynomial RealPolynomial::operator+(const RealPolynomial& o) const {
    std::vector<double> out(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[i] + o[i];
    return RealPolynomial(std::move(out));
}

RealPolynomial RealPolynomial::operator-(const RealPolynomial& o) const { return *this + o * -1.0; }

RealPolynomial RealPolynomial::operator*(const RealPolynomial& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<double> out(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
    return RealPolynomial(std::move(out));
}

RealPolynomial RealPolynomial::operator*(double s) const {
    std::vector<double> out(coeffs_);
    for (double& c : out) c *= s;
    return RealPolynomial(std::move(out));
}

double eval(const RealPolynomial& p, double x) noexcept { return p(x); }

RealPolynomial derivative(const RealPolynomial& p) {
    const auto c = p.coefficients();
    if (c.size() <= 1) return {};
    std::vector<double> out(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) out[i - 1] = static_cast<double>(i) * c[i];
    return RealPolynomial(std::move(out));
}

RealPolynomial antiderivative(const RealPolynomial& p, double anchor_x, double anchor_y) {
    const auto c = p.coefficients();
    std::vector<double> out(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) out[i + 1] = c[i] / static_cast<double>(i + 1);
    RealPolynomial f(out);
    out[0] = anchor_y - f(anchor_x);
    return RealPolynomial(std::move(out));
}

RealPolynomial linear_power(double root, std::size_t power) {
    RealPolynomial out = RealPolynomial::constant(1.0);
    const RealPolynomial factor = RealPolynomial::linear_factor(root);
    for (std::size_t i = 0; i < power; ++i) out = out * factor;
    return out;
}

RealPolynomial hat_transform(const RealPolynomial& p, std::size_t d) {
    if (p.is_zero()) return {};
    if (d < p.degree())
        throw PreconditionError("hat_transform: target degree " + std::to_string(d) + " below polynomial degree " +
                                std::to_string(p.degree()));
    std::vector<double> out(d + 1, 0.0);
    for (std::size_t i = 0; i <= p.degree(); ++i) out[d - i] = p[i];
    return RealPolynomial(std::move(out));
}

DivisionResult synthetic_divide(const RealPolynomial& p, double root) {
    const auto c = p.coefficients();
    if (c.empty()) return {};
    if (c.size() == 1) return {RealPolynomial{}, c[0]};
    std::vector<double> q(c.size() - 1);
    double carry = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        q[i] = carry;
        carry = c[i] + carry * root;
    }
    return {RealPolynomial(std::move(q)), carry};
}

RepeatedDivisionResult synthetic_divide_repeated(const RealPolynomial& p, double root, std::size_t times) {
    RepeatedDivisionResult out{p, {}};
    out.remainders.reserve(times);
    for (std::size_t i = 0; i < times; ++i) {
        auto step = synthetic_divide(out.quotient, root);
        out.quotient = std::move(step.quotient);
        out.remainders.push_back(step.remainder);
    }
    return out;
}

RealPolynomial taylor_shift(const RealPolynomial& p, double center) {
    // Repeated synthetic division: the j-th remainder is the s^j coefficient.
    std::vector<double> out;
    out.reserve(p.degree() + 1);
    RealPolynomial rest = p;
    while (!rest.is_zero()) {
        auto step = synthetic_divide(rest, center);
        out.push_back(step.remainder);
        rest = std::move(step.quotient);
    }
    return RealPolynomial(std::move(out));
}

} // namespace keb
