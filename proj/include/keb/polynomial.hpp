#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace keb {

/// Dense real polynomial, coefficients in ascending degree.
///
/// Trailing zero coefficients are stripped on construction so the leading
/// coefficient is nonzero unless the polynomial is identically zero. The zero
/// polynomial is stored as an empty coefficient list and reports degree 0.
class RealPolynomial {
public:
    RealPolynomial() = default;
    RealPolynomial(std::initializer_list<double> coeffs);
    explicit RealPolynomial(std::vector<double> coeffs);

    static RealPolynomial constant(double c) { return RealPolynomial({c}); }
    /// (x - root)
    static RealPolynomial linear_factor(double root) { return RealPolynomial({-root, 1.0}); }

    std::span<const double> coefficients() const noexcept { return coeffs_; }
    std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    double operator[](std::size_t i) const noexcept { return i < coeffs_.size() ? coeffs_[i] : 0.0; }
    double leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

    /// max |coefficient|, 0 for the zero polynomial
    double scale() const noexcept;

    /// Horner recurrence.
    double operator()(double x) const noexcept;

    RealPolynomial operator+(const RealPolynomial& o) const;
    RealPolynomial operator-(const RealPolynomial& o) const;
    RealPolynomial operator*(const RealPolynomial& o) const;
    RealPolynomial operator*(double s) const;

    friend bool operator==(const RealPolynomial&, const RealPolynomial&) = default;

private:
    void trim();
    std::vector<double> coeffs_;
};

double eval(const RealPolynomial& p, double x) noexcept;

RealPolynomial derivative(const RealPolynomial& p);

/// F with F' = p and F(anchor_x) = anchor_y.
RealPolynomial antiderivative(const RealPolynomial& p, double anchor_x, double anchor_y);

/// (x - root)^power by repeated convolution.
RealPolynomial linear_power(double root, std::size_t power);

/// x^d p(1/x). Throws PreconditionError when d < degree(p).
RealPolynomial hat_transform(const RealPolynomial& p, std::size_t d);

/// p = (x - root) q + r
struct DivisionResult {
    RealPolynomial quotient;
    double remainder = 0.0;
};
DivisionResult synthetic_divide(const RealPolynomial& p, double root);

/// Divides p by (x - root)^times. Every intermediate remainder is returned so
/// callers can judge exactness; the quotient discards them.
struct RepeatedDivisionResult {
    RealPolynomial quotient;
    std::vector<double> remainders;
};
RepeatedDivisionResult synthetic_divide_repeated(const RealPolynomial& p, double root, std::size_t times);

/// Coefficients of p(center + s) in powers of s.
RealPolynomial taylor_shift(const RealPolynomial& p, double center);

} // namespace keb
