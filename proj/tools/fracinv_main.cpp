// Command-line front end: forward solves, reconstructions, gradient checks,
// the two shipped examples, and weight table dumps.

#include "fracinv/config.hpp"
#include "fracinv/errors.hpp"
#include "fracinv/experiment.hpp"
#include "fracinv/fraclap.hpp"
#include "fracinv/output.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitNotConverged = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::size_t n = 0;
    std::size_t refine = 0;
    std::string alpha;
    double tau = 0.0;
    std::size_t max_iter = 0;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts)
{
    cmd->add_option("--config", opts.config_path, "experiment config file (TOML-style)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--n", opts.n, "cells across Omega on the inversion grid");
    cmd->add_option("--refine", opts.refine, "data-generation grid multiplier");
    cmd->add_option("--alpha", opts.alpha, "regularization parameter (number or 'auto')");
    cmd->add_option("--tau", opts.tau, "discrepancy stopping factor");
    cmd->add_option("--max-iter", opts.max_iter, "iteration cap");
    cmd->add_option("--seed", opts.seed, "noise seed");
}

void apply_overrides(fracinv::ExperimentConfig& cfg, const CommonOpts& opts)
{
    if (opts.n != 0) {
        cfg.n_omega = opts.n;
    }
    if (opts.refine != 0) {
        cfg.refine = opts.refine;
    }
    if (!opts.alpha.empty()) {
        if (opts.alpha == "auto" || opts.alpha == "delta_sq") {
            cfg.alpha_auto = true;
        } else {
            cfg.alpha_auto = false;
            cfg.alpha = std::stod(opts.alpha);
        }
    }
    if (opts.tau != 0.0) {
        cfg.tau = opts.tau;
    }
    if (opts.max_iter != 0) {
        cfg.max_iter = opts.max_iter;
    }
    if (opts.seed.has_value()) {
        cfg.seed = *opts.seed;
    }
    if (const char* env = std::getenv("FRACINV_SEED")) {
        cfg.seed = std::strtoull(env, nullptr, 10);
    }
    fracinv::validate(cfg);
}

fracinv::ExperimentConfig resolve_config(const CommonOpts& opts)
{
    fracinv::ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = fracinv::parse_experiment_config(opts.config_path);
    }
    apply_overrides(cfg, opts);
    return cfg;
}

void print_summaries(const fracinv::RunArtifacts& artifacts)
{
    for (const auto& s : artifacts.summaries) {
        std::printf("delta=%g: %s after %zu iterations, E=%.6g, err_q=%.4g, err_g=%.4g\n",
                    s.delta, fracinv::termination_name(s.termination), s.iterations,
                    s.E_final, s.err_q, s.err_g);
    }
    for (const auto& p : artifacts.rec_csvs) {
        std::printf("wrote %s\n", p.c_str());
    }
    for (const auto& p : artifacts.trace_csvs) {
        std::printf("wrote %s\n", p.c_str());
    }
    std::printf("wrote %s\nwrote %s\n", artifacts.plot_q.c_str(), artifacts.plot_g.c_str());
}

int exit_code_for(const fracinv::RunArtifacts& artifacts)
{
    for (const auto& s : artifacts.summaries) {
        if (s.termination == fracinv::Termination::max_iter) {
            return kExitNotConverged;
        }
    }
    return kExitOk;
}

int cmd_forward(const CommonOpts& opts)
{
    const fracinv::ExperimentConfig cfg = resolve_config(opts);
    auto [grid, regions] = fracinv::build_grid(cfg.x_min, cfg.x_max, cfg.omega_a,
                                               cfg.omega_b, cfg.n_omega, cfg.eps_cells);
    const fracinv::FracLapOp op = fracinv::assemble_operator(grid, cfg.s);
    const fracinv::Medium truth = fracinv::truth_medium(cfg, grid, regions);
    const auto [f, f_tilde] = fracinv::make_sources(cfg, grid, regions);

    const fracinv::FieldSolution u = fracinv::solve_state(op, regions, truth, f);
    const fracinv::FieldSolution u_tilde = fracinv::solve_state(op, regions, truth, f_tilde);
    const auto trace_a = fracinv::exterior_trace(op, u, regions).values;
    const auto trace_b = fracinv::exterior_trace(op, u_tilde, regions).values;

    std::filesystem::create_directories(opts.out_dir);
    const std::string sol_path = opts.out_dir + "/forward_solution.csv";
    {
        std::ofstream out(sol_path, std::ios::binary);
        out << "x,u,u_tilde\n";
        char buf[128];
        for (std::size_t i = 0; i < grid.n_nodes; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", grid.node(i),
                          u.values[i], u_tilde.values[i]);
            out << buf;
        }
    }
    const std::string trace_path = opts.out_dir + "/forward_trace.csv";
    {
        std::ofstream out(trace_path, std::ios::binary);
        out << "x,trace_u,trace_u_tilde\n";
        char buf[128];
        for (std::size_t i = 0; i < regions.w2.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                          grid.node(regions.w2[i]), trace_a[i], trace_b[i]);
            out << buf;
        }
    }
    std::printf("solved both forward problems on %zu nodes (residuals %.3g, %.3g)\n",
                grid.n_nodes, u.residual_norm, u_tilde.residual_norm);
    std::printf("wrote %s\nwrote %s\n", sol_path.c_str(), trace_path.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"1D fractional Schroedinger solver and (q, g) reconstruction"};
    app.require_subcommand(1);

    CommonOpts fwd_opts;
    CLI::App* fwd = app.add_subcommand("forward", "solve the two forward problems");
    add_common(fwd, fwd_opts);

    CommonOpts inv_opts;
    CLI::App* inv = app.add_subcommand("invert", "reconstruct (q, g) from synthetic data");
    add_common(inv, inv_opts);

    CommonOpts grad_opts;
    int grad_dirs = 10;
    double grad_t = 1e-5;
    CLI::App* grad = app.add_subcommand("gradcheck",
                                        "compare adjoint gradient with finite differences");
    add_common(grad, grad_opts);
    grad->add_option("--dirs", grad_dirs, "number of random directions");
    grad->add_option("--t", grad_t, "central-difference step");

    CommonOpts ex_opts;
    std::string ex_name;
    double ex_delta = 1e-3;
    CLI::App* ex = app.add_subcommand("example", "run a shipped example configuration");
    ex->add_option("--name", ex_name, "ex1 | ex2")->required();
    ex->add_option("--delta", ex_delta, "noise level");
    add_common(ex, ex_opts);

    double w_s = 0.4;
    std::size_t w_k = 16;
    CLI::App* wts = app.add_subcommand("weights", "print the operator weight table");
    wts->add_option("--s", w_s, "fractional order");
    wts->add_option("--k", w_k, "largest weight index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (fwd->parsed()) {
            return cmd_forward(fwd_opts);
        }
        if (inv->parsed()) {
            const fracinv::ExperimentConfig cfg = resolve_config(inv_opts);
            const fracinv::RunArtifacts artifacts =
                fracinv::run_experiment(cfg, inv_opts.out_dir, "run");
            print_summaries(artifacts);
            return exit_code_for(artifacts);
        }
        if (grad->parsed()) {
            fracinv::ExperimentConfig cfg;
            if (!grad_opts.config_path.empty()) {
                cfg = fracinv::parse_experiment_config(grad_opts.config_path);
            } else {
                // desk-scale default for derivative checks, same gap width 0.25
                cfg.n_omega = 64;
                cfg.eps_cells = 8;
            }
            apply_overrides(cfg, grad_opts);
            const fracinv::GradCheckReport rep =
                fracinv::gradient_check(cfg, grad_dirs, grad_t);
            std::printf("gradient check: %d directions, t=%g\n", rep.n_directions, rep.t);
            std::printf("  max relative error: %.6g\n", rep.max_rel_err);
            std::printf("  max absolute error: %.6g (largest derivative %.6g)\n",
                        rep.max_abs_err, rep.max_abs_value);
            return kExitOk;
        }
        if (ex->parsed()) {
            fracinv::ExperimentConfig cfg = fracinv::example_config(ex_name);
            cfg.deltas = {ex_delta};
            apply_overrides(cfg, ex_opts);
            const fracinv::RunArtifacts artifacts =
                fracinv::run_experiment(cfg, ex_opts.out_dir, ex_name);
            print_summaries(artifacts);
            return exit_code_for(artifacts);
        }
        if (wts->parsed()) {
            const std::vector<double> w = fracinv::fcd_weights(w_s, w_k);
            std::printf("k,w\n");
            for (std::size_t i = 0; i < w.size(); ++i) {
                std::printf("%zu,%.17g\n", i, w[i]);
            }
            return kExitOk;
        }
    } catch (const fracinv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fracinv::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
