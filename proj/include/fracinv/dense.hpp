#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracinv {

/// Dense symmetric LDL^T factorization (row-major storage, no pivoting).
///
/// Interior systems here are symmetric, strongly diagonally dominated in the
/// regimes of interest, and small (a few thousand unknowns at most), so a
/// plain in-place factorization is both adequate and bit-reproducible.
/// A vanishing pivot raises SolverError.
class SymmetricFactor {
public:
    SymmetricFactor(std::vector<double> matrix, std::size_t n);

    std::size_t size() const { return n_; }

    void solve_in_place(std::span<double> rhs) const;
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::vector<double> ld_; // strictly-lower part holds L, diagonal holds D
    std::size_t n_ = 0;
};

} // namespace fracinv
