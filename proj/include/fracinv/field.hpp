#pragma once

#include "fracinv/dense.hpp"
#include "fracinv/fraclap.hpp"
#include "fracinv/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fracinv {

/// The unknown pair of the inverse problem, sampled at interior nodes:
/// q is the potential, g the internal source.
struct Medium {
    std::vector<double> q;
    std::vector<double> g;
};

/// Exterior Dirichlet data. `values` spans the whole lattice (interior slots
/// are ignored by the solvers); nonzeros are confined to `support`, a subset
/// of W1 for physical sources.
struct ExteriorData {
    std::vector<double> values;
    std::vector<std::size_t> support;
};

/// A solved field over the full lattice: interior entries from the linear
/// solve, exterior entries equal to the prescribed data bit-exactly.
struct FieldSolution {
    std::vector<double> values;
    double residual_norm = 0.0; // max-norm residual of the interior equations
};

/// Values of (-Delta)^s(field) at the W2 nodes, ordered by node index.
struct TraceData {
    std::vector<double> values;
};

enum class SourceProfile { one, gauss };

/// Smooth compactly supported exterior source: profile(x) times a cutoff that
/// is 1 on each W1 component shrunk by `margin` and falls to 0 at the component
/// boundary through the bump transition exp(1 - 1/(1 - t^2)).
ExteriorData mollified_source(const GridSpec& grid, const RegionIndex& regions,
                              SourceProfile profile, double margin);

/// Holds the factorization of the interior matrix A + diag(q) for one
/// potential, shared by the state, adjoint, and sensitivity solves. Immutable
/// once built; safe to use from concurrent readers.
class InteriorSolver {
public:
    InteriorSolver(const FracLapOp& op, const RegionIndex& regions,
                   std::span<const double> q, bool warn_on_coercivity = true);

    // ((-Delta)^s + q) u = g in Omega, u = f on the exterior.
    FieldSolution solve_state(std::span<const double> g, const ExteriorData& f) const;

    // ((-Delta)^s + q) v = 0 in Omega, v = residual on W2, 0 elsewhere outside.
    FieldSolution solve_adjoint(const TraceData& residual) const;

    // ((-Delta)^s + q) w = -dq.u + dg in Omega, w = 0 outside.
    FieldSolution solve_sensitivity(const FieldSolution& u, std::span<const double> dq,
                                    std::span<const double> dg) const;

    const CoercivityReport& coercivity() const { return coercivity_; }
    std::size_t interior_size() const { return interior_.size(); }

private:
    FieldSolution solve_with_exterior(std::span<const double> g_interior,
                                      const std::vector<double>& exterior_full) const;

    double scale_ = 0.0;
    std::vector<double> weights_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> prescribed_; // every node not in the interior
    std::vector<std::size_t> w2_;
    std::vector<double> q_;
    CoercivityReport coercivity_;
    SymmetricFactor factor_;
};

// One-shot wrappers over InteriorSolver matching the per-equation contracts.
FieldSolution solve_state(const FracLapOp& op, const RegionIndex& regions,
                          const Medium& medium, const ExteriorData& f);
FieldSolution solve_adjoint(const FracLapOp& op, const RegionIndex& regions,
                            std::span<const double> q, const TraceData& residual);
FieldSolution solve_sensitivity(const FracLapOp& op, const RegionIndex& regions,
                                std::span<const double> q, const FieldSolution& u,
                                std::span<const double> dq, std::span<const double> dg);

/// (-Delta)^s of the full field, evaluated at the W2 nodes.
TraceData exterior_trace(const FracLapOp& op, const FieldSolution& solution,
                         const RegionIndex& regions);

} // namespace fracinv
