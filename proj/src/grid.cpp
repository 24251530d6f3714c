#include "fracinv/grid.hpp"

#include "fracinv/errors.hpp"

#include <cmath>
#include <string>

namespace fracinv {

namespace {

// Number of whole cells covering `len`, or -1 if len is not a near-exact
// multiple of h.
long long cell_count(double len, double h)
{
    const long long k = std::llround(len / h);
    if (k < 0) {
        return -1;
    }
    const double tol = 1e-9 * (std::abs(len) + 1.0);
    if (std::abs(static_cast<double>(k) * h - len) > tol) {
        return -1;
    }
    return k;
}

} // namespace

std::pair<GridSpec, RegionIndex> build_grid(double x_min, double x_max, double omega_a,
                                            double omega_b, std::size_t n_omega,
                                            std::size_t eps_cells)
{
    if (!(x_min < omega_a && omega_a < omega_b && omega_b < x_max)) {
        throw ConfigError("build_grid: require x_min < a < b < x_max");
    }
    if (n_omega < 2) {
        throw ConfigError("build_grid: need at least 2 cells across Omega");
    }
    if (eps_cells < 1) {
        throw ConfigError("build_grid: gap must be at least one grid cell");
    }

    const double h = (omega_b - omega_a) / static_cast<double>(n_omega);
    const long long left = cell_count(omega_a - x_min, h);
    const long long right = cell_count(x_max - omega_b, h);
    if (left < 0 || right < 0) {
        throw ConfigError(
            "build_grid: requested resolution cannot place the Omega endpoints on grid "
            "nodes; choose n_omega so that (a - x_min) and (x_max - b) are whole "
            "multiples of h = (b - a)/n_omega");
    }
    const auto la = static_cast<std::size_t>(left);
    const auto rb = static_cast<std::size_t>(right);
    if (la < eps_cells + 1 || rb < eps_cells + 1) {
        throw ConfigError(
            "build_grid: truncated domain too narrow, no measurement nodes would remain "
            "outside the gap (need more than eps_cells cells on each side of Omega)");
    }

    GridSpec grid;
    grid.x_min = x_min;
    grid.h = h;
    grid.n_nodes = la + n_omega + rb + 1;
    grid.x_max = grid.node(grid.n_nodes - 1);
    grid.eps_gap = static_cast<double>(eps_cells) * h;

    RegionIndex regions;
    regions.omega_lo = la;
    regions.omega_hi = la + n_omega;
    grid.omega_a = grid.node(regions.omega_lo);
    grid.omega_b = grid.node(regions.omega_hi);

    for (std::size_t i = regions.omega_lo + 1; i < regions.omega_hi; ++i) {
        regions.interior.push_back(i);
    }
    for (std::size_t i = 0; i + eps_cells < regions.omega_lo; ++i) {
        regions.w2.push_back(i);
    }
    for (std::size_t i = regions.omega_lo - eps_cells; i < regions.omega_lo; ++i) {
        regions.gap.push_back(i);
    }
    for (std::size_t i = regions.omega_hi + 1; i <= regions.omega_hi + eps_cells; ++i) {
        regions.gap.push_back(i);
    }
    for (std::size_t i = regions.omega_hi + eps_cells + 1; i < grid.n_nodes; ++i) {
        regions.w2.push_back(i);
    }
    regions.w1 = regions.w2;

    return {grid, regions};
}

} // namespace fracinv
