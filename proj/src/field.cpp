#include "fracinv/field.hpp"

#include "fracinv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

namespace fracinv {

namespace {

double bump_cutoff(double x, double lo, double hi, double margin)
{
    const double d = std::min(x - lo, hi - x);
    if (d <= 0.0) {
        return 0.0;
    }
    if (d >= margin) {
        return 1.0;
    }
    const double t = 1.0 - d / margin;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

std::vector<double> assemble_interior_matrix(const FracLapOp& op,
                                             const std::vector<std::size_t>& interior,
                                             std::span<const double> q)
{
    if (q.size() != interior.size() || interior.empty()) {
        throw ConfigError("InteriorSolver: potential length must equal the interior size");
    }
    const std::size_t m = interior.size();
    const double scale = op.scale();
    std::vector<double> a(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t d = i >= j ? i - j : j - i;
            a[i * m + j] = scale * op.weights[d];
        }
        a[i * m + i] += q[i];
    }
    return a;
}

} // namespace

ExteriorData mollified_source(const GridSpec& grid, const RegionIndex& regions,
                              SourceProfile profile, double margin)
{
    // W1 components as coordinate intervals.
    const double left_lo = grid.x_min;
    const double left_hi = grid.omega_a - grid.eps_gap;
    const double right_lo = grid.omega_b + grid.eps_gap;
    const double right_hi = grid.x_max;
    const double narrowest = std::min(left_hi - left_lo, right_hi - right_lo);
    if (!(margin > 0.0) || margin >= 0.5 * narrowest) {
        throw ConfigError(
            "mollified_source: margin must be positive and smaller than half the "
            "narrowest W1 component");
    }

    ExteriorData data;
    data.values.assign(grid.n_nodes, 0.0);
    data.support = regions.w1;
    for (std::size_t idx : regions.w1) {
        const double x = grid.node(idx);
        const double chi = x < grid.omega_a ? bump_cutoff(x, left_lo, left_hi, margin)
                                            : bump_cutoff(x, right_lo, right_hi, margin);
        const double p = profile == SourceProfile::one ? 1.0 : std::exp(-x * x);
        data.values[idx] = p * chi;
    }
    return data;
}

InteriorSolver::InteriorSolver(const FracLapOp& op, const RegionIndex& regions,
                               std::span<const double> q, bool warn_on_coercivity)
    : scale_(op.scale()),
      weights_(op.weights),
      interior_(regions.interior),
      w2_(regions.w2),
      q_(q.begin(), q.end()),
      coercivity_(check_coercivity(op, q)),
      factor_(assemble_interior_matrix(op, regions.interior, q), regions.interior.size())
{
    const std::size_t n = op.n_nodes();
    std::vector<bool> is_interior(n, false);
    for (std::size_t idx : interior_) {
        if (idx >= n) {
            throw ConfigError("InteriorSolver: interior index out of range");
        }
        is_interior[idx] = true;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!is_interior[j]) {
            prescribed_.push_back(j);
        }
    }
    if (!coercivity_.passed() && warn_on_coercivity) {
        std::cerr << "note: potential dips below the diagonal-dominance threshold "
                  << coercivity_.q_threshold
                  << "; proceeding since the factorization succeeded\n";
    }
}

FieldSolution InteriorSolver::solve_with_exterior(std::span<const double> g_interior,
                                                  const std::vector<double>& exterior_full) const
{
    const std::size_t m = interior_.size();
    const std::size_t n = weights_.size();
    if (exterior_full.size() != n) {
        throw ConfigError("InteriorSolver: exterior data must cover every node");
    }
    if (!g_interior.empty() && g_interior.size() != m) {
        throw ConfigError("InteriorSolver: interior right-hand side length mismatch");
    }

    // rhs_i = g_i - sum over prescribed nodes of A_ij f_j
    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double coupling = 0.0;
        const std::size_t node_i = interior_[i];
        for (std::size_t p : prescribed_) {
            const double f = exterior_full[p];
            if (f == 0.0) {
                continue;
            }
            const std::size_t d = node_i >= p ? node_i - p : p - node_i;
            coupling += weights_[d] * f;
        }
        rhs[i] = (g_interior.empty() ? 0.0 : g_interior[i]) - scale_ * coupling;
    }
    double rhs_max = 0.0;
    for (double v : rhs) {
        rhs_max = std::max(rhs_max, std::abs(v));
    }

    const std::vector<double> x = factor_.solve(rhs);

    FieldSolution sol;
    sol.values = exterior_full;
    for (std::size_t i = 0; i < m; ++i) {
        sol.values[interior_[i]] = x[i];
    }

    // Residual of the interior equations against the assembled full field.
    double res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t node_i = interior_[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t d = node_i >= j ? node_i - j : j - node_i;
            acc += weights_[d] * sol.values[j];
        }
        const double g = g_interior.empty() ? 0.0 : g_interior[i];
        res = std::max(res, std::abs(scale_ * acc + q_[i] * x[i] - g));
    }
    sol.residual_norm = res;
    if (!(res <= 1e-10 * (1.0 + rhs_max))) {
        throw SolverError(
            "interior solve residual " + std::to_string(res) +
            " exceeds tolerance; the factorization is unreliable (is 0 a Dirichlet "
            "eigenvalue of the fractional Schroedinger operator for this potential?)");
    }
    return sol;
}

FieldSolution InteriorSolver::solve_state(std::span<const double> g,
                                          const ExteriorData& f) const
{
    return solve_with_exterior(g, f.values);
}

FieldSolution InteriorSolver::solve_adjoint(const TraceData& residual) const
{
    if (residual.values.size() != w2_.size()) {
        throw ConfigError("solve_adjoint: residual must be given on the W2 nodes");
    }
    std::vector<double> ext(weights_.size(), 0.0);
    for (std::size_t j = 0; j < w2_.size(); ++j) {
        ext[w2_[j]] = residual.values[j];
    }
    return solve_with_exterior({}, ext);
}

FieldSolution InteriorSolver::solve_sensitivity(const FieldSolution& u,
                                                std::span<const double> dq,
                                                std::span<const double> dg) const
{
    const std::size_t m = interior_.size();
    if (u.values.size() != weights_.size()) {
        throw ConfigError("solve_sensitivity: state field must cover every node");
    }
    if (dq.size() != m || dg.size() != m) {
        throw ConfigError("solve_sensitivity: perturbation length mismatch");
    }
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        rhs[i] = -dq[i] * u.values[interior_[i]] + dg[i];
    }
    const std::vector<double> ext(weights_.size(), 0.0);
    return solve_with_exterior(rhs, ext);
}

FieldSolution solve_state(const FracLapOp& op, const RegionIndex& regions,
                          const Medium& medium, const ExteriorData& f)
{
    InteriorSolver solver(op, regions, medium.q);
    return solver.solve_state(medium.g, f);
}

FieldSolution solve_adjoint(const FracLapOp& op, const RegionIndex& regions,
                            std::span<const double> q, const TraceData& residual)
{
    InteriorSolver solver(op, regions, q);
    return solver.solve_adjoint(residual);
}

FieldSolution solve_sensitivity(const FracLapOp& op, const RegionIndex& regions,
                                std::span<const double> q, const FieldSolution& u,
                                std::span<const double> dq, std::span<const double> dg)
{
    InteriorSolver solver(op, regions, q);
    return solver.solve_sensitivity(u, dq, dg);
}

TraceData exterior_trace(const FracLapOp& op, const FieldSolution& solution,
                         const RegionIndex& regions)
{
    TraceData trace;
    trace.values = apply_fraclap(op, solution.values, regions.w2);
    return trace;
}

} // namespace fracinv
