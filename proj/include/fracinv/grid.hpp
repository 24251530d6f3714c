#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace fracinv {

/// Uniform 1D lattice over the truncated computational domain [x_min, x_max].
///
/// The physical layout is
///   x_min |== W2/W1 ==|-- gap --| a (== Omega ==) b |-- gap --|== W1/W2 ==| x_max
/// with Omega = (a, b) and a gap of width eps_gap separating Omega from the
/// measurement set W2 on each side. Fields are identically zero outside
/// [x_min, x_max]: exterior sources are supported inside W1, so truncation at
/// the box is exact rather than an approximation.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n_nodes = 0;
    double h = 0.0;
    double omega_a = 0.0;
    double omega_b = 0.0;
    double eps_gap = 0.0;

    double node(std::size_t i) const { return x_min + static_cast<double>(i) * h; }
};

/// Disjoint node-index sets: interior of Omega, the exterior source/measurement
/// sets W1 and W2, and the gap strip (exterior nodes within eps_gap of Omega).
/// Together with the two Omega boundary nodes these partition all indices.
struct RegionIndex {
    std::vector<std::size_t> interior;
    std::vector<std::size_t> w1;
    std::vector<std::size_t> w2;
    std::vector<std::size_t> gap;
    std::size_t omega_lo = 0; // node index of a
    std::size_t omega_hi = 0; // node index of b
};

/// Builds the lattice with n_omega cells across Omega = (a, b) and a gap of
/// eps_cells grid cells on each side of Omega. Rejects resolutions that do not
/// place a, b (and hence x_min, x_max) on grid nodes.
std::pair<GridSpec, RegionIndex> build_grid(double x_min, double x_max, double omega_a,
                                            double omega_b, std::size_t n_omega,
                                            std::size_t eps_cells);

} // namespace fracinv
