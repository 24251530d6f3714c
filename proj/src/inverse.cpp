#include "fracinv/inverse.hpp"

#include "fracinv/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fracinv {

namespace {

constexpr double kGradientFloor = 1e-14;
constexpr int kMaxStepHalvings = 30;

void check_observation(const Observation& obs, std::size_t n_w2)
{
    if (obs.h.size() != n_w2 || obs.h_tilde.size() != n_w2) {
        throw ConfigError("observation traces must have one value per W2 node");
    }
    if (!(obs.delta >= 0.0)) {
        throw ConfigError("noise level delta must be nonnegative");
    }
}

std::vector<double> subtract(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

double relative_l2_error(std::span<const double> est, std::span<const double> truth,
                         double h)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double d = est[i] - truth[i];
        num += d * d;
        den += truth[i] * truth[i];
    }
    num *= h;
    den *= h;
    if (den == 0.0) {
        return std::sqrt(num);
    }
    return std::sqrt(num / den);
}

// All forward-side quantities of one iterate, kept together so the line-search
// trial doubles as the next iteration's forward solve.
struct ForwardWork {
    InteriorSolver solver;
    FieldSolution u;
    FieldSolution u_tilde;
    std::vector<double> r;
    std::vector<double> r_tilde;
    double E = 0.0;
    double J = 0.0;

    ForwardWork(const FracLapOp& op, const RegionIndex& regions, const Medium& medium,
                const ExteriorData& f, const ExteriorData& f_tilde,
                const Observation& obs, double alpha, bool warn)
        : solver(op, regions, medium.q, warn),
          u(solver.solve_state(medium.g, f)),
          u_tilde(solver.solve_state(medium.g, f_tilde))
    {
        r = subtract(exterior_trace(op, u, regions).values, obs.h);
        r_tilde = subtract(exterior_trace(op, u_tilde, regions).values, obs.h_tilde);
        const double h = op.h;
        E = inner_l2(r, r, h) + inner_l2(r_tilde, r_tilde, h);
        J = 0.5 * E +
            0.5 * alpha * (seminorm_sq(medium.q, h) + seminorm_sq(medium.g, h));
    }
};

GradientPair gradient_from_adjoints(const FracLapOp& op, const RegionIndex& regions,
                                    const ForwardWork& work, const Medium& medium,
                                    double alpha)
{
    const FieldSolution v = work.solver.solve_adjoint(TraceData{work.r});
    const FieldSolution v_tilde = work.solver.solve_adjoint(TraceData{work.r_tilde});

    const std::size_t m = regions.interior.size();
    GradientPair grad;
    grad.q = regularizer_grad(medium.q, alpha, op.h);
    grad.g = regularizer_grad(medium.g, alpha, op.h);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t node = regions.interior[i];
        const double vi = v.values[node];
        const double vti = v_tilde.values[node];
        grad.q[i] += work.u.values[node] * vi + work.u_tilde.values[node] * vti;
        grad.g[i] += -vi - vti;
    }
    return grad;
}

} // namespace

const char* termination_name(Termination t)
{
    switch (t) {
    case Termination::discrepancy:
        return "discrepancy";
    case Termination::max_iter:
        return "max_iter";
    case Termination::gradient_floor:
        return "gradient_floor";
    }
    return "unknown";
}

double inner_l2(std::span<const double> a, std::span<const double> b, double h)
{
    if (a.size() != b.size()) {
        throw ConfigError("inner_l2: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return h * acc;
}

double seminorm_sq(std::span<const double> v, double h)
{
    return seminorm_inner(v, v, h);
}

double seminorm_inner(std::span<const double> a, std::span<const double> b, double h)
{
    if (a.size() != b.size()) {
        throw ConfigError("seminorm_inner: length mismatch");
    }
    const std::size_t m = a.size();
    double acc = 0.0;
    double prev_a = 0.0;
    double prev_b = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double da = (i < m ? a[i] : 0.0) - prev_a;
        const double db = (i < m ? b[i] : 0.0) - prev_b;
        acc += da * db;
        if (i < m) {
            prev_a = a[i];
            prev_b = b[i];
        }
    }
    return acc / h; // h * sum((da/h)*(db/h))
}

std::vector<double> regularizer_grad(std::span<const double> v, double alpha, double h)
{
    const std::size_t m = v.size();
    std::vector<double> out(m, 0.0);
    if (alpha == 0.0 || m == 0) {
        return out;
    }
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < m; ++i) {
        const double left = i > 0 ? v[i - 1] : 0.0;
        const double right = i + 1 < m ? v[i + 1] : 0.0;
        out[i] = alpha * inv_h2 * (2.0 * v[i] - left - right);
    }
    return out;
}

ObjectiveEval eval_functional(const FracLapOp& op, const RegionIndex& regions,
                              const Medium& medium, const ExteriorData& f,
                              const ExteriorData& f_tilde, const Observation& obs,
                              double alpha)
{
    check_observation(obs, regions.w2.size());
    const ForwardWork work(op, regions, medium, f, f_tilde, obs, alpha, false);
    ObjectiveEval eval;
    eval.J = work.J;
    eval.E = work.E;
    eval.r = work.r;
    eval.r_tilde = work.r_tilde;
    return eval;
}

GradientPair eval_gradient(const FracLapOp& op, const RegionIndex& regions,
                           const Medium& medium, const ExteriorData& f,
                           const ExteriorData& f_tilde, const Observation& obs,
                           double alpha)
{
    check_observation(obs, regions.w2.size());
    const ForwardWork work(op, regions, medium, f, f_tilde, obs, alpha, false);
    return gradient_from_adjoints(op, regions, work, medium, alpha);
}

std::optional<double> conjugate_coefficient(const GradientPair& grad_now,
                                            const GradientPair& grad_prev, double h)
{
    const double prev = inner_l2(grad_prev.q, grad_prev.q, h) +
                        inner_l2(grad_prev.g, grad_prev.g, h);
    if (prev == 0.0) {
        return std::nullopt;
    }
    const double now =
        inner_l2(grad_now.q, grad_now.q, h) + inner_l2(grad_now.g, grad_now.g, h);
    return now / prev;
}

GradientPair descent_direction(const GradientPair& grad, double gamma,
                               const GradientPair* prev_direction, double h)
{
    const std::size_t m = grad.q.size();
    GradientPair dir;
    dir.q.resize(m);
    dir.g.resize(grad.g.size());
    for (std::size_t i = 0; i < m; ++i) {
        dir.q[i] = -grad.q[i] +
                   (prev_direction != nullptr ? gamma * prev_direction->q[i] : 0.0);
    }
    for (std::size_t i = 0; i < grad.g.size(); ++i) {
        dir.g[i] = -grad.g[i] +
                   (prev_direction != nullptr ? gamma * prev_direction->g[i] : 0.0);
    }
    const double slope = inner_l2(grad.q, dir.q, h) + inner_l2(grad.g, dir.g, h);
    if (slope >= 0.0) {
        // Not a descent direction: restart with steepest descent.
        for (std::size_t i = 0; i < m; ++i) {
            dir.q[i] = -grad.q[i];
        }
        for (std::size_t i = 0; i < grad.g.size(); ++i) {
            dir.g[i] = -grad.g[i];
        }
    }
    return dir;
}

double step_size(const FracLapOp& op, const RegionIndex& regions,
                 const InteriorSolver& solver, const FieldSolution& u,
                 const FieldSolution& u_tilde, std::span<const double> r,
                 std::span<const double> r_tilde, const GradientPair& direction,
                 const Medium& medium, double alpha)
{
    double dir_norm = 0.0;
    for (double v : direction.q) {
        dir_norm += v * v;
    }
    for (double v : direction.g) {
        dir_norm += v * v;
    }
    if (dir_norm == 0.0) {
        throw SolverError("step_size: zero search direction");
    }

    const FieldSolution w = solver.solve_sensitivity(u, direction.q, direction.g);
    const FieldSolution w_tilde =
        solver.solve_sensitivity(u_tilde, direction.q, direction.g);
    const std::vector<double> fw = exterior_trace(op, w, regions).values;
    const std::vector<double> fw_tilde = exterior_trace(op, w_tilde, regions).values;

    const double h = op.h;
    const double num = inner_l2(r, fw, h) + inner_l2(r_tilde, fw_tilde, h) +
                       alpha * (seminorm_inner(medium.q, direction.q, h) +
                                seminorm_inner(medium.g, direction.g, h));
    const double den = inner_l2(fw, fw, h) + inner_l2(fw_tilde, fw_tilde, h) +
                       alpha * (seminorm_sq(direction.q, h) +
                                seminorm_sq(direction.g, h));
    if (den <= 0.0 || !std::isfinite(den)) {
        throw SolverError(
            "step_size: degenerate line search, the direction produces no trace "
            "response and the penalty term vanishes");
    }
    return -num / den;
}

ReconstructionResult reconstruct(const FracLapOp& op, const RegionIndex& regions,
                                 const ExteriorData& f, const ExteriorData& f_tilde,
                                 const Observation& obs, const CGConfig& cfg,
                                 const Medium* truth)
{
    check_observation(obs, regions.w2.size());
    const std::size_t m = regions.interior.size();
    if (cfg.max_iter < 1) {
        throw ConfigError("reconstruct: max_iter must be at least 1");
    }
    if (!(cfg.alpha >= 0.0) || !(cfg.tau > 0.0)) {
        throw ConfigError("reconstruct: require alpha >= 0 and tau > 0");
    }
    if (truth != nullptr && (truth->q.size() != m || truth->g.size() != m)) {
        throw ConfigError("reconstruct: truth medium length mismatch");
    }

    CGState st;
    st.iterate.q = cfg.q0.empty() ? std::vector<double>(m, 0.0) : cfg.q0;
    st.iterate.g = cfg.g0.empty() ? std::vector<double>(m, 0.0) : cfg.g0;
    if (st.iterate.q.size() != m || st.iterate.g.size() != m) {
        throw ConfigError("reconstruct: initial guess length mismatch");
    }

    const double h = op.h;
    const double threshold = cfg.tau * obs.delta * obs.delta;

    ReconstructionResult result;

    auto make_record = [&](const ForwardWork& work) {
        IterationRecord rec;
        rec.k = st.k;
        rec.J_value = work.J;
        rec.E_value = work.E;
        if (truth != nullptr) {
            rec.err_q = relative_l2_error(st.iterate.q, truth->q, h);
            rec.err_g = relative_l2_error(st.iterate.g, truth->g, h);
        } else {
            rec.err_q = std::numeric_limits<double>::quiet_NaN();
            rec.err_g = std::numeric_limits<double>::quiet_NaN();
        }
        return rec;
    };

    try {
        ForwardWork work(op, regions, st.iterate, f, f_tilde, obs, cfg.alpha, true);
        while (true) {
            result.trace.push_back(make_record(work));
            if (work.E <= threshold) {
                result.termination = Termination::discrepancy;
                break;
            }
            if (st.k >= cfg.max_iter) {
                result.termination = Termination::max_iter;
                break;
            }

            GradientPair grad =
                gradient_from_adjoints(op, regions, work, st.iterate, cfg.alpha);
            const double grad_sq =
                inner_l2(grad.q, grad.q, h) + inner_l2(grad.g, grad.g, h);
            if (std::sqrt(grad_sq) <= kGradientFloor) {
                result.termination = Termination::gradient_floor;
                break;
            }

            double gamma = 0.0;
            const GradientPair* prev = nullptr;
            if (st.k > 0 && st.grad_norm_sq > 0.0) {
                gamma = grad_sq / st.grad_norm_sq;
                prev = &st.direction;
            }
            GradientPair dir = descent_direction(grad, gamma, prev, h);
            if (prev != nullptr) {
                // Record the effective coefficient: 0 whenever the restart fired.
                double cand_slope = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    cand_slope += grad.q[i] * (-grad.q[i] + gamma * st.direction.q[i]) +
                                  grad.g[i] * (-grad.g[i] + gamma * st.direction.g[i]);
                }
                if (cand_slope >= 0.0) {
                    gamma = 0.0;
                }
            }

            double beta = step_size(op, regions, work.solver, work.u, work.u_tilde,
                                    work.r, work.r_tilde, dir, st.iterate, cfg.alpha);

            // The linearized step is exact only for g-directions; guard the
            // descent property by halving until J actually decreases.
            Medium trial;
            std::optional<ForwardWork> trial_work;
            for (int attempt = 0; attempt <= kMaxStepHalvings; ++attempt) {
                trial.q.resize(m);
                trial.g.resize(m);
                for (std::size_t i = 0; i < m; ++i) {
                    trial.q[i] = st.iterate.q[i] + beta * dir.q[i];
                    trial.g[i] = st.iterate.g[i] + beta * dir.g[i];
                }
                trial_work.emplace(op, regions, trial, f, f_tilde, obs, cfg.alpha,
                                   false);
                if (trial_work->J <= work.J || attempt == kMaxStepHalvings) {
                    break;
                }
                beta *= 0.5;
            }
            if (trial_work->J > work.J) {
                // No decrease even at a vanishing step: report the cap honestly.
                result.termination = Termination::max_iter;
                break;
            }

            result.trace.back().beta = beta;
            result.trace.back().gamma = gamma;

            st.iterate = std::move(trial);
            st.gradient = std::move(grad);
            st.direction = std::move(dir);
            st.grad_norm_sq = grad_sq;
            work = std::move(*trial_work);
            ++st.k;
        }
    } catch (const SolverError& e) {
        throw SolverError("iteration " + std::to_string(st.k) + ": " + e.what());
    }

    result.medium = std::move(st.iterate);
    return result;
}

} // namespace fracinv
