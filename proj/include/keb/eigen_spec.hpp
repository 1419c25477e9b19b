#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace keb {

/// Base dimension n, fiber rank k and the Ricci eigenvalues of the base metric.
///
/// Eigenvalues are stored sorted ascending. The constants used throughout the
/// profile construction are derived on demand:
///   m  = n + k
///   nu = 2k / (m+1)          (the root of the (y - nu)^(k-1) factor of P)
///   mu_i = 2k lambda_i/(m+1) (the remaining roots of P)
///   lambda_star = (m+1)/(2k) = 1/nu
class EigenSpec {
public:
    /// Throws PreconditionError for n < 1, k < 1, a wrong eigenvalue count or
    /// non-finite entries. The eigenvalue bound lambda_i < 1 is not enforced
    /// here; see below_one().
    EigenSpec(int n, int k, std::vector<double> eigenvalues);

    /// n copies of one eigenvalue
    static EigenSpec uniform(int n, int k, double lambda);

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    int m() const noexcept { return n_ + k_; }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

    double nu() const noexcept { return 2.0 * k_ / (m() + 1); }
    double mu(int i) const { return nu() * eigenvalues_.at(static_cast<std::size_t>(i)); }
    double lambda_star() const noexcept { return (m() + 1) / (2.0 * k_); }
    double lambda_max() const noexcept { return eigenvalues_.back(); }

    /// every lambda_i < 1; required by the global profile construction
    bool below_one() const noexcept { return eigenvalues_.back() < 1.0; }

    /// the common eigenvalue when all are equal (exact comparison)
    std::optional<double> common_eigenvalue() const noexcept;

    std::string to_string() const;

private:
    int n_;
    int k_;
    std::vector<double> eigenvalues_;
};

} // namespace keb
