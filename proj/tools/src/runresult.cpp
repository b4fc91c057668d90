#include "runresult.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace phi4::cli {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string RunResult::csv_columns_compare() {
    return "lambda,epsilon,cutoff,n_modes,fock_dim,n_max,top_shell,quantum_fe,classical_fe,"
           "classical_se,classical_ess,heavy_tail,gap,gap_se,tau_over_log_eps,e_over_log_eps_sq,"
           "i_norm";
}

std::string RunResult::csv_columns_scan() {
    return "lambda,epsilon,cutoff,n_modes,classical_fe,classical_se,classical_ess,heavy_tail,"
           "reference_fe,reference_se,reference_ess,gap,gap_se,tau_over_log_eps,"
           "e_over_log_eps_sq,i_norm";
}

std::string RunResult::to_csv() const {
    std::ostringstream out;
    const bool compare = command == "compare";
    out << (compare ? csv_columns_compare() : csv_columns_scan()) << "\n";
    for (const PointRecord& p : points) {
        out << fmt(p.lambda) << ',' << fmt(p.epsilon) << ',' << fmt(p.cutoff) << ','
            << p.n_modes << ',';
        if (compare) {
            out << p.fock_dim.value_or(0) << ',' << p.n_max.value_or(0) << ','
                << fmt(p.top_shell.value_or(0.0)) << ',' << fmt(p.quantum_fe.value_or(0.0)) << ',';
        }
        out << fmt(p.classical_fe) << ',' << fmt(p.classical_se) << ',' << fmt(p.classical_ess)
            << ',' << (p.heavy_tail ? 1 : 0) << ',';
        if (!compare) {
            out << fmt(p.reference_fe.value_or(0.0)) << ',' << fmt(p.reference_se.value_or(0.0))
                << ',' << fmt(p.reference_ess.value_or(0.0)) << ',';
        }
        out << fmt(p.gap) << ',' << fmt(p.gap_se) << ',' << fmt(p.tau_over_log_eps) << ','
            << fmt(p.e_over_log_eps_sq) << ',' << fmt(p.i_norm) << "\n";
    }
    return out.str();
}

std::string RunResult::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["code_version"] = kCodeVersion;
    j["command"] = command;
    j["config"] = config_snapshot;
    j["started"] = started;
    j["finished"] = finished;
    nlohmann::json pts = nlohmann::json::array();
    for (const PointRecord& p : points) {
        nlohmann::json e;
        e["lambda"] = p.lambda;
        e["epsilon"] = p.epsilon;
        e["cutoff"] = p.cutoff;
        e["n_modes"] = p.n_modes;
        if (p.quantum_fe) e["quantum_fe"] = *p.quantum_fe;
        if (p.fock_dim) e["fock_dim"] = *p.fock_dim;
        if (p.n_max) e["n_max"] = *p.n_max;
        if (p.top_shell) e["top_shell"] = *p.top_shell;
        e["classical_fe"] = p.classical_fe;
        e["classical_se"] = p.classical_se;
        e["classical_ess"] = p.classical_ess;
        e["heavy_tail"] = p.heavy_tail;
        if (p.reference_fe) e["reference_fe"] = *p.reference_fe;
        if (p.reference_se) e["reference_se"] = *p.reference_se;
        if (p.reference_ess) e["reference_ess"] = *p.reference_ess;
        e["gap"] = p.gap;
        e["gap_se"] = p.gap_se;
        e["tau_over_log_eps"] = p.tau_over_log_eps;
        e["e_over_log_eps_sq"] = p.e_over_log_eps_sq;
        e["i_norm"] = p.i_norm;
        pts.push_back(e);
    }
    j["points"] = pts;
    return j.dump(2) + "\n";
}

RunResult RunResult::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("plot: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("plot: malformed RunResult JSON in " + path + ": " + e.what());
    }
    RunResult r;
    try {
        r.command = j.at("command").get<std::string>();
        r.config_snapshot = j.at("config").get<std::string>();
        r.started = j.value("started", "");
        r.finished = j.value("finished", "");
        for (const auto& e : j.at("points")) {
            PointRecord p;
            p.lambda = e.at("lambda").get<double>();
            p.epsilon = e.at("epsilon").get<double>();
            p.cutoff = e.at("cutoff").get<double>();
            p.n_modes = e.at("n_modes").get<int>();
            if (e.contains("quantum_fe")) p.quantum_fe = e["quantum_fe"].get<double>();
            if (e.contains("fock_dim")) p.fock_dim = e["fock_dim"].get<int>();
            if (e.contains("n_max")) p.n_max = e["n_max"].get<int>();
            if (e.contains("top_shell")) p.top_shell = e["top_shell"].get<double>();
            p.classical_fe = e.at("classical_fe").get<double>();
            p.classical_se = e.at("classical_se").get<double>();
            p.classical_ess = e.at("classical_ess").get<double>();
            p.heavy_tail = e.value("heavy_tail", false);
            if (e.contains("reference_fe")) p.reference_fe = e["reference_fe"].get<double>();
            if (e.contains("reference_se")) p.reference_se = e["reference_se"].get<double>();
            if (e.contains("reference_ess")) p.reference_ess = e["reference_ess"].get<double>();
            p.gap = e.at("gap").get<double>();
            p.gap_se = e.at("gap_se").get<double>();
            p.tau_over_log_eps = e.value("tau_over_log_eps", 0.0);
            p.e_over_log_eps_sq = e.value("e_over_log_eps_sq", 0.0);
            p.i_norm = e.value("i_norm", 0.0);
            r.points.push_back(p);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("plot: RunResult JSON in " + path + " misses fields: " + e.what());
    }
    return r;
}

void write_file(const std::string& path, const std::string& contents) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << contents;
}

}  // namespace phi4::cli
