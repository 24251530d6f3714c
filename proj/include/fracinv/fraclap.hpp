#pragma once

#include "fracinv/grid.hpp"
#include "fracinv/quadrature.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracinv {

/// Discrete integral fractional Laplacian (-Delta)^s on the uniform lattice,
/// realized with the fractional centered-difference weights
///
///   w_k = (-1)^k Gamma(2s+1) / (Gamma(s-k+1) Gamma(s+k+1)),
///
/// so that ((-Delta)_h^s u)_i = h^{-2s} sum_k w_k u_{i-k} with u understood as
/// zero outside the truncated domain. The weight span covers the whole domain
/// (K = n_nodes - 1), which makes the truncation exact for such fields. The
/// induced matrix on any index window is symmetric Toeplitz: w_0 > 0 and
/// w_k < 0 for k >= 1, with every symmetric partial sum positive and
/// decreasing toward 0.
struct FracLapOp {
    double s = 0.0;
    double h = 0.0;
    std::vector<double> weights; // w_0 .. w_K, symmetric half
    double c1s = 0.0;            // analytic normalization c_{1,s}, used by the quadrature

    double scale() const; // h^{-2s}
    std::size_t n_nodes() const { return weights.size(); }
};

/// Fractional centered-difference weights w_0..w_K for order s in (0,1),
/// computed by the stable recurrence w_{k+1} = w_k (k - s)/(k + 1 + s).
std::vector<double> fcd_weights(double s, std::size_t k_max);

/// Normalization constant c_{1,s} = 4^s Gamma(1/2 + s) / (sqrt(pi) |Gamma(-s)|).
double normalization_constant(double s);

FracLapOp assemble_operator(const GridSpec& grid, double s);

/// Applies the operator to a full-domain field at the requested node indices.
/// Out-of-domain samples are treated as zero; out-of-range indices are rejected.
std::vector<double> apply_fraclap(const FracLapOp& op, std::span<const double> field,
                                  std::span<const std::size_t> at);

/// Solvability check in the spirit of the diagonal-dominance conditions for
/// (-Delta)^s + q: per-node diagonal positivity and positivity of the minimal
/// interior Gershgorin row sum shifted by min q.
struct CoercivityReport {
    bool diag_ok = false;       // h^{-2s} w_0 + q_j > 0 at every interior node
    bool rowsum_ok = false;     // rowsum_margin > 0
    double rowsum_margin = 0.0; // min over interior rows of (min q + scaled row sum)
    double q_threshold = 0.0;   // -(minimal interior row sum): the binding bound on min q
    double diag_threshold = 0.0; // -(h^{-2s} w_0): bound implied by the diagonal condition

    bool passed() const { return diag_ok && rowsum_ok; }
};

CoercivityReport check_coercivity(const FracLapOp& op, std::span<const double> q);

/// Direct principal-value quadrature of
///   c_{1,s} P.V. integral (u(x) - u(y)) / |x - y|^{1+2s} dy
/// for a compactly supported u that is twice differentiable near x. The
/// singular neighbourhood |y - x| <= r_inner is handled by second-order Taylor
/// subtraction (the odd term cancels by symmetry; the even term integrates in
/// closed form; the remainder is integrated adaptively), the rest by adaptive
/// quadrature plus analytic tails where u vanishes. This is the brute-force
/// reference the lattice operator is verified against.
struct FraclapQuadOptions {
    double r_inner = 0.25;
    double tol = 1e-9;
    // Algebraic endpoint singularities (support edges of d^s profiles) refine
    // along a chain of cells, so depth is cheap; small s needs a lot of it.
    int max_depth = 180;
};

QuadResult fraclap_quadrature(const std::function<double(double)>& u, double x, double s,
                              double support_lo, double support_hi,
                              const FraclapQuadOptions& opts = {});

} // namespace fracinv
