#pragma once

#include "fracinv/field.hpp"
#include "fracinv/fraclap.hpp"
#include "fracinv/grid.hpp"
#include "fracinv/inverse.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fracinv {

/// Full description of a synthetic reconstruction experiment.
struct ExperimentConfig {
    double s = 0.4;
    double omega_a = -1.0;
    double omega_b = 1.0;
    double x_min = -3.0;
    double x_max = 3.0;
    std::size_t n_omega = 128;   // cells across Omega on the inversion grid
    std::size_t eps_cells = 16;  // gap width in inversion-grid cells (0.25 at n=128)
    std::size_t refine = 4;      // data-generation grid multiplier (nested)
    std::vector<double> deltas = {1e-3, 1e-2};
    bool alpha_auto = true;      // alpha = delta^2 per run
    double alpha = 0.0;          // explicit value when alpha_auto is false
    double tau = 4.0;
    std::size_t max_iter = 500;
    SourceProfile profile_f = SourceProfile::one;
    SourceProfile profile_f_tilde = SourceProfile::gauss;
    double margin = 0.75;        // mollifier transition width
    std::string truth_preset = "ex1"; // ex1 | ex2 | zero | tabulated
    std::vector<double> truth_q;      // used when truth_preset == "tabulated"
    std::vector<double> truth_g;
    std::uint64_t seed = 7;
};

/// Throws ConfigError on any violated invariant (refine >= 2, deltas >= 0, ...).
void validate(const ExperimentConfig& cfg);

/// Named experiment presets reproducing the two shipped examples.
ExperimentConfig example_config(const std::string& name);

/// Truth medium sampled at the interior nodes of the given grid.
Medium truth_medium(const ExperimentConfig& cfg, const GridSpec& grid,
                    const RegionIndex& regions);

/// Exterior sources (f, f_tilde) built on the given grid per the config.
std::pair<ExteriorData, ExteriorData> make_sources(const ExperimentConfig& cfg,
                                                   const GridSpec& grid,
                                                   const RegionIndex& regions);

/// Solves both forward problems for the truth medium on the refined grid,
/// restricts the exterior traces to the (nested) coarse W2 nodes, and adds
/// seeded uniform noise delta * (2 rand - 1) per node and channel. Returns one
/// observation per configured delta; all deltas share the same unit noise
/// pattern scaled, so degradation with delta is monotone by construction.
std::vector<Observation> synthesize_observation(const ExperimentConfig& cfg);

/// Noise-free same-grid data for consistency experiments (deliberately commits
/// the inverse crime; not used by the shipped example configurations).
Observation make_exact_observation(const FracLapOp& op, const RegionIndex& regions,
                                   const Medium& medium, const ExteriorData& f,
                                   const ExteriorData& f_tilde);

struct GradCheckReport {
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    double max_abs_value = 0.0; // largest |directional derivative| encountered
    int n_directions = 0;
    double t = 0.0;
};

/// Compares the adjoint-state gradient against central differences of J over
/// seeded random directions, at the medium (q0, g0) (zeros by default).
GradCheckReport gradient_check(const ExperimentConfig& cfg, int n_directions, double t,
                               const Medium* at = nullptr);

struct RunSummary {
    double delta = 0.0;
    std::size_t iterations = 0; // number of CG updates performed
    Termination termination = Termination::max_iter;
    double E_final = 0.0;
    double err_q = 0.0;
    double err_g = 0.0;
};

struct RunArtifacts {
    std::vector<std::string> rec_csvs;
    std::vector<std::string> trace_csvs;
    std::string plot_q;
    std::string plot_g;
    std::vector<RunSummary> summaries;
};

struct RunOutput {
    double delta = 0.0;
    Medium reconstruction;
    std::vector<IterationRecord> trace;
    Termination termination = Termination::max_iter;
};

/// Runs the full pipeline for every delta in the config: synthesize, invert,
/// emit artifacts under out_dir with the given file stub.
RunArtifacts run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                            const std::string& stub);

/// Builds the named example configuration restricted to a single delta and
/// runs it.
RunArtifacts run_example(const std::string& name, double delta, std::uint64_t seed,
                         const std::string& out_dir);

} // namespace fracinv
