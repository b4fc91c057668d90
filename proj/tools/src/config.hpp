// Experiment configuration: a single INI-style text file with sections,
// plus the CLI overrides.  The parsed struct can re-serialize itself to a
// canonical snapshot, which is embedded in every RunResult for replay.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phi4/free_energy.hpp"

namespace phi4::cli {

struct ExperimentConfig {
    // [run]
    bool theorem_mode = true;
    std::uint64_t seed = 20240901;
    std::string out_dir = "runs";
    int threads = 0;

    // [potential]
    PotentialSpec::Family family = PotentialSpec::Family::Gaussian;
    double width = 1.0;
    double budget = 1e12;

    // [scan]
    std::vector<double> lambda_list{0.5, 0.3, 0.2, 0.1};
    double eta = 0.04;
    double nu = 0.33;
    double reference_cutoff = 60.0;

    // [compare]
    double compare_cutoff = 1.0;
    std::vector<Mode> compare_modes;  // optional explicit list
    double shell_tol = 1e-6;
    int n_max_hint = 8;

    // [mc]
    std::int64_t n_samples = 100000;
    int chunk = 4096;
    int grid = 0;

    /// Parses the file; ConfigError on malformed lines or unknown keys.
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& text, const std::string& origin);

    /// Theorem-mode exponent validation (8*eta < nu < 1/3, eta < 1/24);
    /// exploratory mode only warns (returned as a message, empty if none).
    std::string validate() const;

    /// Canonical INI snapshot; parse(snapshot()) round-trips.
    std::string snapshot() const;

    PotentialSpec potential(double epsilon) const;
    McOptions mc_options(std::uint64_t derived_seed) const;
};

}  // namespace phi4::cli
