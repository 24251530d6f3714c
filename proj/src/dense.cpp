#include "fracinv/dense.hpp"

#include "fracinv/errors.hpp"

#include <cmath>
#include <limits>

namespace fracinv {

SymmetricFactor::SymmetricFactor(std::vector<double> matrix, std::size_t n)
    : ld_(std::move(matrix)), n_(n)
{
    if (ld_.size() != n_ * n_ || n_ == 0) {
        throw ConfigError("SymmetricFactor: matrix storage does not match dimension");
    }

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        max_diag = std::max(max_diag, std::abs(ld_[i * n_ + i]));
    }
    const double pivot_floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, max_diag);

    std::vector<double> col(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            col[k] = ld_[j * n_ + k] * ld_[k * n_ + k];
        }
        double d = ld_[j * n_ + j];
        for (std::size_t k = 0; k < j; ++k) {
            d -= ld_[j * n_ + k] * col[k];
        }
        if (std::abs(d) <= pivot_floor) {
            throw SolverError(
                "interior system factorization hit a vanishing pivot; "
                "0 appears to be a Dirichlet eigenvalue of the fractional "
                "Schroedinger operator for this potential");
        }
        ld_[j * n_ + j] = d;
        for (std::size_t i = j + 1; i < n_; ++i) {
            double lij = ld_[i * n_ + j];
            for (std::size_t k = 0; k < j; ++k) {
                lij -= ld_[i * n_ + k] * col[k];
            }
            ld_[i * n_ + j] = lij / d;
        }
    }
}

void SymmetricFactor::solve_in_place(std::span<double> rhs) const
{
    if (rhs.size() != n_) {
        throw ConfigError("SymmetricFactor::solve: rhs length mismatch");
    }
    // L y = b
    for (std::size_t i = 0; i < n_; ++i) {
        double y = rhs[i];
        for (std::size_t k = 0; k < i; ++k) {
            y -= ld_[i * n_ + k] * rhs[k];
        }
        rhs[i] = y;
    }
    // D z = y
    for (std::size_t i = 0; i < n_; ++i) {
        rhs[i] /= ld_[i * n_ + i];
    }
    // L^T x = z
    for (std::size_t ii = n_; ii-- > 0;) {
        double x = rhs[ii];
        for (std::size_t k = ii + 1; k < n_; ++k) {
            x -= ld_[k * n_ + ii] * rhs[k];
        }
        rhs[ii] = x;
    }
}

std::vector<double> SymmetricFactor::solve(std::span<const double> rhs) const
{
    std::vector<double> x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

} // namespace fracinv
