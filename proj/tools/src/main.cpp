// phi4gibbs: construct renormalized Gibbs measures and grand-canonical Gibbs
// states of the 2D torus Bose gas at finite spectral cutoff, and verify the
// identities, inequalities, and convergence behavior connecting them.
//
// Subcommands: compare, scan-classical, verify, plot, husimi, definetti,
// berezin.  Exit codes: 0 pass, 1 invariant failure, 2 configuration error.
#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    using namespace phi4::cli;

    CLI::App app{"renormalized Gibbs measures and Gibbs states on the 2D torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "experiment config file (INI sections)");
    app.add_option("--out", out_dir, "output directory (overrides [run] out)");
    app.add_option("--mode", mode, "theorem | exploratory (overrides [run] mode)")
        ->check(CLI::IsMember({"theorem", "exploratory"}));
    app.add_option_function<std::uint64_t>(
           "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; }, "base RNG seed (u64)");

    const auto sub = [&](const char* name, const char* desc) {
        auto* s = app.add_subcommand(name, desc);
        s->fallthrough();  // global flags may follow the subcommand
        return s;
    };
    auto* compare = sub("compare", "quantum vs classical projected free energy");
    auto* scan = sub("scan-classical", "joint (K, eps) classical limit scan");
    auto* verify = sub("verify", "run an invariant suite");
    std::string suite = "all";
    verify->add_option("--suite", suite, "spectral | classical | quantum | semiclassics | all");
    auto* plot = sub("plot", "render SVG plots from a RunResult JSON");
    std::string run_json;
    plot->add_option("run", run_json, "path to compare.json / scan.json")->required();
    auto* husimi = sub("husimi", "lower symbol vs the free-state Gaussian oracle");
    auto* definetti = sub("definetti", "de Finetti moment identity checks");
    auto* berezin = sub("berezin", "Berezin-Lieb inequality margins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg =
            config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
        if (seed_set) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (mode == "theorem") cfg.theorem_mode = true;
        if (mode == "exploratory") cfg.theorem_mode = false;

        if (*compare) return cmd_compare(cfg);
        if (*scan) return cmd_scan_classical(cfg);
        if (*verify) return cmd_verify(cfg, suite);
        if (*plot) return cmd_plot(run_json, out_dir.empty() ? cfg.out_dir : out_dir);
        if (*husimi) return cmd_husimi(cfg);
        if (*definetti) return cmd_definetti(cfg);
        if (*berezin) return cmd_berezin(cfg);
    } catch (const phi4::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
