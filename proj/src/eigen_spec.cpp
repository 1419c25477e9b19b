#include "keb/eigen_spec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "keb/error.hpp"

namespace keb {

EigenSpec::EigenSpec(int n, int k, std::vector<double> eigenvalues)
    : n_(n), k_(k), eigenvalues_(std::move(eigenvalues)) {
    if (n_ < 1) throw PreconditionError("EigenSpec: base dimension n must be >= 1");
    if (k_ < 1) throw PreconditionError("EigenSpec: fiber rank k must be >= 1");
    if (eigenvalues_.size() != static_cast<std::size_t>(n_))
        throw PreconditionError("EigenSpec: expected " + std::to_string(n_) + " eigenvalues, got " +
                                std::to_string(eigenvalues_.size()));
    for (double v : eigenvalues_)
        if (!std::isfinite(v)) throw PreconditionError("EigenSpec: non-finite eigenvalue");
    std::sort(eigenvalues_.begin(), eigenvalues_.end());
}

EigenSpec EigenSpec::uniform(int n, int k, double lambda) {
    if (n < 1) throw PreconditionError("EigenSpec: base dimension n must be >= 1");
    return EigenSpec(n, k, std::vector<double>(static_cast<std::size_t>(n), lambda));
}

std::optional<double> EigenSpec::common_eigenvalue() const noexcept {
    if (eigenvalues_.front() == eigenvalues_.back()) return eigenvalues_.front();
    return std::nullopt;
}

std::string EigenSpec::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n_ << " k=" << k_ << " eigenvalues=[";
    for (std::size_t i = 0; i < eigenvalues_.size(); ++i) os << (i ? "," : "") << eigenvalues_[i];
    os << "]";
    return os.str();
}

} // namespace keb
