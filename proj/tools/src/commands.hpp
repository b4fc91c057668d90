#pragma once

#include <string>

#include "config.hpp"

namespace phi4::cli {

// Exit codes: 0 pass, 1 invariant failure, 2 configuration error.
int cmd_compare(const ExperimentConfig& cfg);
int cmd_scan_classical(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg, const std::string& suite);
int cmd_plot(const std::string& run_json, const std::string& out_dir);
int cmd_husimi(const ExperimentConfig& cfg);
int cmd_definetti(const ExperimentConfig& cfg);
int cmd_berezin(const ExperimentConfig& cfg);

}  // namespace phi4::cli
