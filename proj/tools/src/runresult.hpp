// RunResult persistence: per-point CSV (fixed, documented columns) plus a
// JSON document with full provenance (config snapshot, schema version).
// CSV bytes are deterministic for identical (config, seed, binary).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace phi4::cli {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kCodeVersion = "phi4gibbs 0.1.0";

struct PointRecord {
    double lambda = 0.0;
    double epsilon = 0.0;
    double cutoff = 0.0;
    int n_modes = 0;
    // quantum side (compare only)
    std::optional<double> quantum_fe;
    std::optional<int> fock_dim;
    std::optional<int> n_max;
    std::optional<double> top_shell;
    // classical side
    double classical_fe = 0.0;
    double classical_se = 0.0;
    double classical_ess = 0.0;
    bool heavy_tail = false;
    // reference side (scan only)
    std::optional<double> reference_fe;
    std::optional<double> reference_se;
    std::optional<double> reference_ess;
    double gap = 0.0;
    double gap_se = 0.0;
    // counterterm diagnostics
    double tau_over_log_eps = 0.0;
    double e_over_log_eps_sq = 0.0;
    double i_norm = 0.0;
};

struct RunResult {
    std::string command;  // "compare" or "scan-classical"
    std::string config_snapshot;
    std::vector<PointRecord> points;
    std::string started;   // ISO timestamps; JSON only, never in the CSV
    std::string finished;

    /// compare.csv / scan.csv column sets are fixed; see columns() below.
    std::string to_csv() const;
    std::string to_json() const;
    static RunResult from_json_file(const std::string& path);

    static std::string csv_columns_compare();
    static std::string csv_columns_scan();
};

/// Writes string contents to path, creating parent directories.
void write_file(const std::string& path, const std::string& contents);

}  // namespace phi4::cli
