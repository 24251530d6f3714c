#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracinv/config.hpp"
#include "fracinv/errors.hpp"
#include "fracinv/experiment.hpp"
#include "fracinv/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fracinv;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig cfg = example_config("ex1");
    cfg.n_omega = 32;
    cfg.eps_cells = 4;
    cfg.refine = 2;
    cfg.deltas = {1e-2};
    cfg.max_iter = 40;
    cfg.seed = 7;
    return cfg;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& text)
{
    std::size_t n = 0;
    for (char c : text) {
        if (c == '\n') {
            ++n;
        }
    }
    return n;
}

} // namespace

TEST_CASE("synthesize_observation: noise bound, determinism, nesting guard")
{
    ExperimentConfig cfg = small_config();
    cfg.deltas = {0.0, 1e-3};
    const auto obs = synthesize_observation(cfg);
    REQUIRE(obs.size() == 2);

    // delta = 0 gives the restricted fine-grid trace exactly; the noisy
    // channel deviates from it by at most delta, nodewise
    bool any_nonzero = false;
    for (std::size_t i = 0; i < obs[0].h.size(); ++i) {
        const double d = std::abs(obs[1].h[i] - obs[0].h[i]);
        CHECK(d <= 1e-3);
        any_nonzero = any_nonzero || d > 0.0;
    }
    CHECK(any_nonzero);
    for (std::size_t i = 0; i < obs[0].h_tilde.size(); ++i) {
        CHECK(std::abs(obs[1].h_tilde[i] - obs[0].h_tilde[i]) <= 1e-3);
    }

    // same seed reproduces the observation bit for bit
    const auto again = synthesize_observation(cfg);
    CHECK(again[1].h == obs[1].h);
    CHECK(again[1].h_tilde == obs[1].h_tilde);

    // a different seed gives different noise
    ExperimentConfig other = cfg;
    other.seed = 8;
    const auto reseeded = synthesize_observation(other);
    CHECK(reseeded[1].h != obs[1].h);

    // refine < 2 would commit the inverse crime and is rejected
    ExperimentConfig crime = cfg;
    crime.refine = 1;
    CHECK_THROWS_AS(synthesize_observation(crime), ConfigError);
}

TEST_CASE("truth presets sample the documented functions")
{
    ExperimentConfig cfg = small_config();
    auto [grid, regions] = build_grid(cfg.x_min, cfg.x_max, cfg.omega_a, cfg.omega_b,
                                      cfg.n_omega, cfg.eps_cells);
    cfg.truth_preset = "ex1";
    const Medium ex1 = truth_medium(cfg, grid, regions);
    cfg.truth_preset = "ex2";
    const Medium ex2 = truth_medium(cfg, grid, regions);
    for (std::size_t i = 0; i < regions.interior.size(); ++i) {
        const double x = grid.node(regions.interior[i]);
        CHECK(ex1.q[i] == doctest::Approx(std::sin(x)).epsilon(1e-15));
        CHECK(ex1.g[i] == doctest::Approx(std::cos(x)).epsilon(1e-15));
        CHECK(ex2.q[i] == doctest::Approx(1.0 - x * x).epsilon(1e-14));
        CHECK(ex2.g[i] == doctest::Approx(1.0 - x * x * x * x).epsilon(1e-14));
    }

    cfg.truth_preset = "tabulated";
    cfg.truth_q = {1.0, 2.0};
    cfg.truth_g = {0.0, 1.0};
    CHECK_THROWS_AS(truth_medium(cfg, grid, regions), ConfigError);
}

TEST_CASE("gradient_check reports tiny errors at desk scale")
{
    ExperimentConfig cfg = example_config("ex1");
    cfg.n_omega = 64;
    cfg.eps_cells = 8;
    cfg.deltas = {1e-3};
    const GradCheckReport rep = gradient_check(cfg, 5, 1e-5);
    CHECK(rep.n_directions == 5);
    CHECK(rep.max_rel_err <= 1e-6);

    CHECK_THROWS_AS(gradient_check(cfg, 5, 1e-1), ConfigError);
    CHECK_THROWS_AS(gradient_check(cfg, 0, 1e-5), ConfigError);
}

TEST_CASE("run_experiment emits complete, deterministic artifacts")
{
    const ExperimentConfig cfg = small_config();
    const std::string dir_a = "harness_out_a";
    const std::string dir_b = "harness_out_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);

    const RunArtifacts a = run_experiment(cfg, dir_a, "probe");
    REQUIRE(a.rec_csvs.size() == 1);
    REQUIRE(a.trace_csvs.size() == 1);
    REQUIRE(a.summaries.size() == 1);

    // termination reason is one of the three documented outcomes
    const Termination t = a.summaries[0].termination;
    CHECK((t == Termination::discrepancy || t == Termination::max_iter ||
           t == Termination::gradient_floor));

    // reconstruction CSV: one row per interior node plus a header
    auto [grid, regions] = build_grid(cfg.x_min, cfg.x_max, cfg.omega_a, cfg.omega_b,
                                      cfg.n_omega, cfg.eps_cells);
    const std::string rec = slurp(a.rec_csvs[0]);
    CHECK(count_lines(rec) == regions.interior.size() + 1);
    CHECK(rec.rfind("x,q_true,q_rec,g_true,g_rec\n", 0) == 0);

    // trace CSV: one row per record (iterations + 1) plus a header
    const std::string trace = slurp(a.trace_csvs[0]);
    CHECK(count_lines(trace) == a.summaries[0].iterations + 2);
    CHECK(trace.rfind("iter,J,E,beta,gamma,err_q,err_g\n", 0) == 0);

    // plots exist and are non-empty SVG documents
    const std::string plot = slurp(a.plot_q);
    CHECK(plot.rfind("<svg", 0) == 0);
    CHECK(!slurp(a.plot_g).empty());

    // identical config and seed reproduce byte-identical artifacts
    const RunArtifacts b = run_experiment(cfg, dir_b, "probe");
    CHECK(slurp(b.rec_csvs[0]) == rec);
    CHECK(slurp(b.trace_csvs[0]) == trace);

    // a different seed changes the data and hence the CSV bytes
    ExperimentConfig reseeded = cfg;
    reseeded.seed = 12345;
    std::filesystem::remove_all(dir_b);
    const RunArtifacts c = run_experiment(reseeded, dir_b, "probe");
    CHECK(slurp(c.rec_csvs[0]) != rec);

    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("config parser: sections, types, and validation")
{
    const std::string text = R"(
# sample experiment
[problem]
s = 0.4
omega = [-1.0, 1.0]
domain = [-3.0, 3.0]
n_omega = 32
eps_cells = 4

[sources]
f = "one"
f_tilde = "gauss"
margin = 0.5

[truth]
preset = "ex2"

[data]
refine = 2
delta = [1e-3, 1e-2]   # two noise levels
seed = 11

[solver]
alpha = "delta_sq"
tau = 40
max_iter = 120
)";
    const ExperimentConfig cfg = parse_experiment_config_text(text);
    CHECK(cfg.s == doctest::Approx(0.4));
    CHECK(cfg.n_omega == 32);
    CHECK(cfg.eps_cells == 4);
    CHECK(cfg.margin == doctest::Approx(0.5));
    CHECK(cfg.profile_f == SourceProfile::one);
    CHECK(cfg.profile_f_tilde == SourceProfile::gauss);
    CHECK(cfg.truth_preset == "ex2");
    CHECK(cfg.refine == 2);
    REQUIRE(cfg.deltas.size() == 2);
    CHECK(cfg.deltas[0] == doctest::Approx(1e-3));
    CHECK(cfg.deltas[1] == doctest::Approx(1e-2));
    CHECK(cfg.seed == 11);
    CHECK(cfg.alpha_auto);
    CHECK(cfg.tau == doctest::Approx(40.0));
    CHECK(cfg.max_iter == 120);

    // scalar delta and explicit alpha
    const ExperimentConfig scalar = parse_experiment_config_text(
        "[data]\ndelta = 0.05\nrefine = 2\n[solver]\nalpha = 1e-6\n");
    REQUIRE(scalar.deltas.size() == 1);
    CHECK(scalar.deltas[0] == doctest::Approx(0.05));
    CHECK(!scalar.alpha_auto);
    CHECK(scalar.alpha == doctest::Approx(1e-6));

    // unknown keys and malformed values are rejected with location info
    CHECK_THROWS_AS(parse_experiment_config_text("[problem]\nspeed = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config_text("[problem]\ns = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config_text("[data]\nrefine = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config_text("[sources]\nf = \"box\"\n"), ConfigError);
}

TEST_CASE("config files round-trip through the file-based parser")
{
    const std::string path = "harness_cfg_probe.toml";
    {
        std::ofstream out(path, std::ios::binary);
        out << "[problem]\nn_omega = 48\neps_cells = 6\n"
               "[data]\nrefine = 2\ndelta = 5e-3\nseed = 3\n";
    }
    const ExperimentConfig cfg = parse_experiment_config(path);
    CHECK(cfg.n_omega == 48);
    CHECK(cfg.eps_cells == 6);
    CHECK(cfg.refine == 2);
    CHECK(cfg.seed == 3);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(parse_experiment_config("definitely_missing.toml"), ConfigError);
}

TEST_CASE("example presets carry the documented stopping constants")
{
    const ExperimentConfig ex1 = example_config("ex1");
    CHECK(ex1.tau == doctest::Approx(4.0));
    CHECK(ex1.truth_preset == "ex1");
    const ExperimentConfig ex2 = example_config("ex2");
    CHECK(ex2.tau == doctest::Approx(40.0));
    CHECK(ex2.truth_preset == "ex2");
    CHECK(ex1.alpha_auto);
    CHECK(ex2.alpha_auto);
    CHECK_THROWS_AS(example_config("ex3"), ConfigError);
}
