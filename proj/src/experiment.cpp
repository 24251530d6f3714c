#include "fracinv/experiment.hpp"

#include "fracinv/errors.hpp"
#include "fracinv/output.hpp"
#include "fracinv/rng.hpp"

#include <cmath>
#include <tuple>
#include <utility>

namespace fracinv {

namespace {

struct Lattice {
    GridSpec grid;
    RegionIndex regions;
    FracLapOp op;
};

Lattice build_lattice(const ExperimentConfig& cfg, std::size_t n_omega,
                      std::size_t eps_cells)
{
    Lattice lat;
    std::tie(lat.grid, lat.regions) =
        build_grid(cfg.x_min, cfg.x_max, cfg.omega_a, cfg.omega_b, n_omega, eps_cells);
    lat.op = assemble_operator(lat.grid, cfg.s);
    return lat;
}

double run_alpha(const ExperimentConfig& cfg, double delta)
{
    return cfg.alpha_auto ? delta * delta : cfg.alpha;
}

} // namespace

void validate(const ExperimentConfig& cfg)
{
    if (!(cfg.s > 0.0 && cfg.s < 1.0)) {
        throw ConfigError("config: s must lie in (0,1)");
    }
    if (!(cfg.x_min < cfg.omega_a && cfg.omega_a < cfg.omega_b && cfg.omega_b < cfg.x_max)) {
        throw ConfigError("config: require x_min < a < b < x_max");
    }
    if (cfg.refine < 2) {
        throw ConfigError("config: refine must be an integer >= 2 (data and inversion "
                          "grids must differ to avoid the inverse crime)");
    }
    if (cfg.deltas.empty()) {
        throw ConfigError("config: at least one noise level is required");
    }
    for (double d : cfg.deltas) {
        if (!(d >= 0.0)) {
            throw ConfigError("config: noise levels must be nonnegative");
        }
    }
    if (!cfg.alpha_auto && !(cfg.alpha >= 0.0)) {
        throw ConfigError("config: alpha must be nonnegative");
    }
    if (!(cfg.tau > 0.0)) {
        throw ConfigError("config: tau must be positive");
    }
    if (cfg.max_iter < 1) {
        throw ConfigError("config: max_iter must be at least 1");
    }
    if (!(cfg.margin > 0.0)) {
        throw ConfigError("config: mollifier margin must be positive");
    }
    if (cfg.truth_preset != "ex1" && cfg.truth_preset != "ex2" &&
        cfg.truth_preset != "zero" && cfg.truth_preset != "tabulated") {
        throw ConfigError("config: unknown truth preset '" + cfg.truth_preset + "'");
    }
    if (cfg.truth_preset == "tabulated" &&
        (cfg.truth_q.empty() || cfg.truth_q.size() != cfg.truth_g.size())) {
        throw ConfigError("config: tabulated truth needs q and g tables of equal size");
    }
}

ExperimentConfig example_config(const std::string& name)
{
    ExperimentConfig cfg;
    if (name == "ex1") {
        cfg.truth_preset = "ex1";
        cfg.tau = 4.0;
    } else if (name == "ex2") {
        cfg.truth_preset = "ex2";
        cfg.tau = 40.0;
    } else {
        throw ConfigError("unknown example '" + name + "' (expected ex1 or ex2)");
    }
    return cfg;
}

Medium truth_medium(const ExperimentConfig& cfg, const GridSpec& grid,
                    const RegionIndex& regions)
{
    const std::size_t m = regions.interior.size();
    Medium medium;
    medium.q.resize(m);
    medium.g.resize(m);
    if (cfg.truth_preset == "tabulated") {
        if (cfg.truth_q.size() != m) {
            throw ConfigError("tabulated truth has " + std::to_string(cfg.truth_q.size()) +
                              " entries but the grid has " + std::to_string(m) +
                              " interior nodes");
        }
        medium.q = cfg.truth_q;
        medium.g = cfg.truth_g;
        return medium;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double x = grid.node(regions.interior[i]);
        if (cfg.truth_preset == "ex1") {
            medium.q[i] = std::sin(x);
            medium.g[i] = std::cos(x);
        } else if (cfg.truth_preset == "ex2") {
            medium.q[i] = 1.0 - x * x;
            medium.g[i] = 1.0 - x * x * x * x;
        } else { // zero
            medium.q[i] = 0.0;
            medium.g[i] = 0.0;
        }
    }
    return medium;
}

std::pair<ExteriorData, ExteriorData> make_sources(const ExperimentConfig& cfg,
                                                   const GridSpec& grid,
                                                   const RegionIndex& regions)
{
    return {mollified_source(grid, regions, cfg.profile_f, cfg.margin),
            mollified_source(grid, regions, cfg.profile_f_tilde, cfg.margin)};
}

std::vector<Observation> synthesize_observation(const ExperimentConfig& cfg)
{
    validate(cfg);
    const Lattice coarse = build_lattice(cfg, cfg.n_omega, cfg.eps_cells);
    const Lattice fine =
        build_lattice(cfg, cfg.n_omega * cfg.refine, cfg.eps_cells * cfg.refine);
    if (fine.regions.omega_lo != cfg.refine * coarse.regions.omega_lo) {
        throw ConfigError("synthesize_observation: refined grid is not nested in the "
                          "inversion grid");
    }

    const Medium truth = truth_medium(cfg, fine.grid, fine.regions);
    const auto [f, f_tilde] = make_sources(cfg, fine.grid, fine.regions);
    const InteriorSolver solver(fine.op, fine.regions, truth.q, false);
    const FieldSolution u = solver.solve_state(truth.g, f);
    const FieldSolution u_tilde = solver.solve_state(truth.g, f_tilde);

    // Fine-grid traces at the fine nodes that coincide with coarse W2 nodes.
    std::vector<std::size_t> fine_at;
    fine_at.reserve(coarse.regions.w2.size());
    for (std::size_t idx : coarse.regions.w2) {
        fine_at.push_back(idx * cfg.refine);
    }
    const std::vector<double> trace_a = apply_fraclap(fine.op, u.values, fine_at);
    const std::vector<double> trace_b = apply_fraclap(fine.op, u_tilde.values, fine_at);

    std::vector<Observation> observations;
    observations.reserve(cfg.deltas.size());
    for (double delta : cfg.deltas) {
        std::mt19937_64 rng(cfg.seed);
        Observation obs;
        obs.delta = delta;
        obs.h.resize(trace_a.size());
        obs.h_tilde.resize(trace_b.size());
        for (std::size_t i = 0; i < trace_a.size(); ++i) {
            obs.h[i] = trace_a[i] + delta * uniform_sym(rng);
        }
        for (std::size_t i = 0; i < trace_b.size(); ++i) {
            obs.h_tilde[i] = trace_b[i] + delta * uniform_sym(rng);
        }
        observations.push_back(std::move(obs));
    }
    return observations;
}

Observation make_exact_observation(const FracLapOp& op, const RegionIndex& regions,
                                   const Medium& medium, const ExteriorData& f,
                                   const ExteriorData& f_tilde)
{
    const InteriorSolver solver(op, regions, medium.q, false);
    const FieldSolution u = solver.solve_state(medium.g, f);
    const FieldSolution u_tilde = solver.solve_state(medium.g, f_tilde);
    Observation obs;
    obs.delta = 0.0;
    obs.h = exterior_trace(op, u, regions).values;
    obs.h_tilde = exterior_trace(op, u_tilde, regions).values;
    return obs;
}

GradCheckReport gradient_check(const ExperimentConfig& cfg, int n_directions, double t,
                               const Medium* at)
{
    if (!(t > 1e-8 && t < 1e-2)) {
        throw ConfigError("gradient_check: step t must lie in (1e-8, 1e-2)");
    }
    if (n_directions < 1) {
        throw ConfigError("gradient_check: need at least one direction");
    }
    const Lattice lat = build_lattice(cfg, cfg.n_omega, cfg.eps_cells);
    const auto [f, f_tilde] = make_sources(cfg, lat.grid, lat.regions);
    const std::vector<Observation> observations = synthesize_observation(cfg);
    const Observation& obs = observations.front();
    const double alpha = run_alpha(cfg, obs.delta);

    const std::size_t m = lat.regions.interior.size();
    Medium medium;
    if (at != nullptr) {
        medium = *at;
    } else {
        medium.q.assign(m, 0.0);
        medium.g.assign(m, 0.0);
    }

    const GradientPair grad =
        eval_gradient(lat.op, lat.regions, medium, f, f_tilde, obs, alpha);

    GradCheckReport report;
    report.n_directions = n_directions;
    report.t = t;
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int d = 0; d < n_directions; ++d) {
        std::vector<double> dq(m);
        std::vector<double> dg(m);
        for (std::size_t i = 0; i < m; ++i) {
            dq[i] = uniform_sym(rng);
        }
        for (std::size_t i = 0; i < m; ++i) {
            dg[i] = uniform_sym(rng);
        }

        Medium plus = medium;
        Medium minus = medium;
        for (std::size_t i = 0; i < m; ++i) {
            plus.q[i] += t * dq[i];
            plus.g[i] += t * dg[i];
            minus.q[i] -= t * dq[i];
            minus.g[i] -= t * dg[i];
        }
        const double jp =
            eval_functional(lat.op, lat.regions, plus, f, f_tilde, obs, alpha).J;
        const double jm =
            eval_functional(lat.op, lat.regions, minus, f, f_tilde, obs, alpha).J;
        const double fd = (jp - jm) / (2.0 * t);
        const double pairing = inner_l2(grad.q, dq, lat.op.h) +
                               inner_l2(grad.g, dg, lat.op.h);

        const double abs_err = std::abs(pairing - fd);
        report.max_abs_err = std::max(report.max_abs_err, abs_err);
        report.max_abs_value = std::max(report.max_abs_value, std::abs(fd));
        if (std::abs(fd) > 1e-14) {
            report.max_rel_err = std::max(report.max_rel_err, abs_err / std::abs(fd));
        }
    }
    return report;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                            const std::string& stub)
{
    validate(cfg);
    const Lattice lat = build_lattice(cfg, cfg.n_omega, cfg.eps_cells);
    const Medium truth = truth_medium(cfg, lat.grid, lat.regions);
    const auto [f, f_tilde] = make_sources(cfg, lat.grid, lat.regions);
    const std::vector<Observation> observations = synthesize_observation(cfg);

    std::vector<RunOutput> runs;
    runs.reserve(observations.size());
    for (const Observation& obs : observations) {
        CGConfig cg;
        cg.alpha = run_alpha(cfg, obs.delta);
        cg.tau = cfg.tau;
        cg.max_iter = cfg.max_iter;
        ReconstructionResult res =
            reconstruct(lat.op, lat.regions, f, f_tilde, obs, cg, &truth);
        RunOutput run;
        run.delta = obs.delta;
        run.reconstruction = std::move(res.medium);
        run.trace = std::move(res.trace);
        run.termination = res.termination;
        runs.push_back(std::move(run));
    }
    return emit_outputs(out_dir, stub, lat.grid, lat.regions, truth, runs);
}

RunArtifacts run_example(const std::string& name, double delta, std::uint64_t seed,
                         const std::string& out_dir)
{
    ExperimentConfig cfg = example_config(name);
    cfg.deltas = {delta};
    cfg.seed = seed;
    return run_experiment(cfg, out_dir, name);
}

} // namespace fracinv
