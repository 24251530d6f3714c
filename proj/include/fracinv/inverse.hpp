#pragma once

#include "fracinv/field.hpp"
#include "fracinv/fraclap.hpp"
#include "fracinv/grid.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fracinv {

/// Noisy exterior measurements on the W2 nodes: channel `h` for the first
/// exterior source, `h_tilde` for the second, plus the noise level delta.
struct Observation {
    std::vector<double> h;
    std::vector<double> h_tilde;
    double delta = 0.0;
};

struct CGConfig {
    double alpha = 0.0;        // Tikhonov regularization parameter
    double tau = 4.0;          // stopping factor: stop once E <= tau * delta^2
    std::size_t max_iter = 500;
    std::vector<double> q0;    // initial guesses; empty means zeros
    std::vector<double> g0;
};

enum class Termination { discrepancy, max_iter, gradient_floor };

const char* termination_name(Termination t);

struct IterationRecord {
    std::size_t k = 0;
    double J_value = 0.0;
    double E_value = 0.0; // data misfit, the stopping quantity
    double beta = 0.0;    // step size applied when moving from this iterate
    double gamma = 0.0;   // conjugate coefficient used at this iterate (0 on restart)
    double err_q = 0.0;   // relative L2 errors vs truth when truth is supplied
    double err_g = 0.0;
};

struct GradientPair {
    std::vector<double> q;
    std::vector<double> g;
};

/// Rolling state of the conjugate gradient loop.
struct CGState {
    Medium iterate;
    GradientPair gradient;
    GradientPair direction;
    double grad_norm_sq = 0.0; // h * sum(grad_q^2 + grad_g^2)
    std::size_t k = 0;
};

struct ObjectiveEval {
    double J = 0.0;
    double E = 0.0;
    std::vector<double> r;       // trace(u) - h
    std::vector<double> r_tilde; // trace(u_tilde) - h_tilde
};

/// Discrete L2(Omega) quantities for the interior arrays, rectangle rule h*sum.
double inner_l2(std::span<const double> a, std::span<const double> b, double h);

/// h * sum of squared forward differences of v extended by zero one node beyond
/// each end (the discrete H1 seminorm squared of the admissible class).
double seminorm_sq(std::span<const double> v, double h);
double seminorm_inner(std::span<const double> a, std::span<const double> b, double h);

/// Gradient of the smoothness penalty (alpha/2) * seminorm_sq(v): alpha D^T D v
/// with homogeneous Dirichlet extension, the discrete realization of -alpha v''.
std::vector<double> regularizer_grad(std::span<const double> v, double alpha, double h);

/// Tikhonov functional
///   J = 1/2 h sum_W2 (r^2 + r_tilde^2) + alpha/2 (|Dq|^2 + |Dg|^2) h,
/// together with the misfit E = h sum_W2 (r^2 + r_tilde^2) and both residuals.
ObjectiveEval eval_functional(const FracLapOp& op, const RegionIndex& regions,
                              const Medium& medium, const ExteriorData& f,
                              const ExteriorData& f_tilde, const Observation& obs,
                              double alpha);

/// Adjoint-state gradient of J with respect to (q, g) in the h-weighted inner
/// product: (u v + u~ v~ + alpha D^T D q, -v - v~ + alpha D^T D g).
GradientPair eval_gradient(const FracLapOp& op, const RegionIndex& regions,
                           const Medium& medium, const ExteriorData& f,
                           const ExteriorData& f_tilde, const Observation& obs,
                           double alpha);

/// Fletcher-Reeves ratio of the stacked gradient norms; nullopt signals that
/// the previous gradient vanished and the caller should stop.
std::optional<double> conjugate_coefficient(const GradientPair& grad_now,
                                            const GradientPair& grad_prev, double h);

/// d = -grad + gamma * prev; falls back to steepest descent whenever the
/// combination fails to be a descent direction.
GradientPair descent_direction(const GradientPair& grad, double gamma,
                               const GradientPair* prev_direction, double h);

/// Step size making the linearized (Gauss-Newton) line function stationary:
/// solves both sensitivity problems with (dq, dg) = d and evaluates
///   beta = -[ h sum(r Fw + r~ Fw~) + alpha (<Dq,Dd_q> + <Dg,Dd_g>) h ]
///         / [ h sum(Fw^2 + Fw~^2) + alpha (|Dd_q|^2 + |Dd_g|^2) h ].
double step_size(const FracLapOp& op, const RegionIndex& regions,
                 const InteriorSolver& solver, const FieldSolution& u,
                 const FieldSolution& u_tilde, std::span<const double> r,
                 std::span<const double> r_tilde, const GradientPair& direction,
                 const Medium& medium, double alpha);

struct ReconstructionResult {
    Medium medium;
    std::vector<IterationRecord> trace;
    Termination termination = Termination::max_iter;
};

/// Conjugate gradient reconstruction of (q, g) from the two-channel
/// observation. Stops on the discrepancy rule E <= tau * delta^2, the
/// iteration cap, or a vanishing gradient. J is non-increasing across the
/// returned records.
ReconstructionResult reconstruct(const FracLapOp& op, const RegionIndex& regions,
                                 const ExteriorData& f, const ExteriorData& f_tilde,
                                 const Observation& obs, const CGConfig& cfg,
                                 const Medium* truth = nullptr);

} // namespace fracinv
