#include "config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace phi4::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<double> parse_double_list(const std::string& v, const std::string& where) {
    std::vector<double> out;
    std::istringstream iss(v);
    double x;
    while (iss >> x) out.push_back(x);
    if (out.empty()) throw ConfigError(where + ": expected a list of numbers");
    return out;
}

std::vector<Mode> parse_mode_list(const std::string& v, const std::string& where) {
    // "k1,k2; k1,k2; ..."
    std::vector<Mode> out;
    std::istringstream iss(v);
    std::string part;
    while (std::getline(iss, part, ';')) {
        part = trim(part);
        if (part.empty()) continue;
        int a, b;
        if (std::sscanf(part.c_str(), "%d , %d", &a, &b) != 2) {
            throw ConfigError(where + ": expected 'k1,k2' pairs separated by ';'");
        }
        out.push_back({a, b});
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = t.substr(1, t.size() - 2);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string qual = section + "." + key;

        try {
            if (qual == "run.mode") {
                if (value == "theorem") cfg.theorem_mode = true;
                else if (value == "exploratory") cfg.theorem_mode = false;
                else throw ConfigError(where + ": mode must be theorem or exploratory");
            } else if (qual == "run.seed") {
                cfg.seed = std::strtoull(value.c_str(), nullptr, 10);
            } else if (qual == "run.out") {
                cfg.out_dir = value;
            } else if (qual == "run.threads") {
                cfg.threads = std::stoi(value);
            } else if (qual == "potential.family") {
                if (value == "gaussian") cfg.family = PotentialSpec::Family::Gaussian;
                else if (value == "point") cfg.family = PotentialSpec::Family::PointK0;
                else throw ConfigError(where + ": unknown potential family '" + value + "'");
            } else if (qual == "potential.width") {
                cfg.width = std::stod(value);
            } else if (qual == "potential.budget") {
                cfg.budget = std::stod(value);
            } else if (qual == "scan.lambda_list") {
                cfg.lambda_list = parse_double_list(value, where);
            } else if (qual == "scan.eta") {
                cfg.eta = std::stod(value);
            } else if (qual == "scan.nu") {
                cfg.nu = std::stod(value);
            } else if (qual == "scan.reference_cutoff") {
                cfg.reference_cutoff = std::stod(value);
            } else if (qual == "compare.cutoff") {
                cfg.compare_cutoff = std::stod(value);
            } else if (qual == "compare.modes") {
                cfg.compare_modes = parse_mode_list(value, where);
            } else if (qual == "compare.shell_tol") {
                cfg.shell_tol = std::stod(value);
            } else if (qual == "compare.n_max_hint") {
                cfg.n_max_hint = std::stoi(value);
            } else if (qual == "mc.n_samples") {
                cfg.n_samples = std::stoll(value);
            } else if (qual == "mc.chunk") {
                cfg.chunk = std::stoi(value);
            } else if (qual == "mc.grid") {
                cfg.grid = std::stoi(value);
            } else {
                throw ConfigError(where + ": unknown key '" + qual + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError(where + ": malformed value for '" + qual + "'");
        }
    }
    return cfg;
}

std::string ExperimentConfig::validate() const {
    if (theorem_mode) {
        if (!(eta > 0.0 && eta < 1.0 / 24.0)) {
            throw ConfigError("config: theorem mode requires eta in (0, 1/24), got eta = " +
                              std::to_string(eta));
        }
        if (!(nu > 8.0 * eta && nu < 1.0 / 3.0)) {
            throw ConfigError("config: theorem mode requires 8*eta < nu < 1/3, got eta = " +
                              std::to_string(eta) + ", nu = " + std::to_string(nu));
        }
        return {};
    }
    if (!(eta > 0.0 && nu > 0.0)) {
        throw ConfigError("config: eta and nu must be positive");
    }
    if (!(eta < 1.0 / 24.0 && nu > 8.0 * eta && nu < 1.0 / 3.0)) {
        return "warning: exponents violate the theorem window (eta in (0,1/24), 8*eta < nu < 1/3); "
               "running in exploratory mode";
    }
    return {};
}

std::string ExperimentConfig::snapshot() const {
    char buf[64];
    std::ostringstream out;
    out << "[run]\n";
    out << "mode = " << (theorem_mode ? "theorem" : "exploratory") << "\n";
    std::snprintf(buf, sizeof buf, "%" PRIu64, seed);
    out << "seed = " << buf << "\n";
    out << "out = " << out_dir << "\n";
    out << "threads = " << threads << "\n";
    out << "\n[potential]\n";
    out << "family = " << (family == PotentialSpec::Family::Gaussian ? "gaussian" : "point")
        << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", width);
    out << "width = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", budget);
    out << "budget = " << buf << "\n";
    out << "\n[scan]\n";
    out << "lambda_list =";
    for (double l : lambda_list) {
        std::snprintf(buf, sizeof buf, " %.17g", l);
        out << buf;
    }
    out << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", eta);
    out << "eta = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", nu);
    out << "nu = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", reference_cutoff);
    out << "reference_cutoff = " << buf << "\n";
    out << "\n[compare]\n";
    std::snprintf(buf, sizeof buf, "%.17g", compare_cutoff);
    out << "cutoff = " << buf << "\n";
    if (!compare_modes.empty()) {
        out << "modes = ";
        for (std::size_t i = 0; i < compare_modes.size(); ++i) {
            out << compare_modes[i][0] << "," << compare_modes[i][1];
            if (i + 1 < compare_modes.size()) out << "; ";
        }
        out << "\n";
    }
    std::snprintf(buf, sizeof buf, "%.17g", shell_tol);
    out << "shell_tol = " << buf << "\n";
    out << "n_max_hint = " << n_max_hint << "\n";
    out << "\n[mc]\n";
    out << "n_samples = " << n_samples << "\n";
    out << "chunk = " << chunk << "\n";
    out << "grid = " << grid << "\n";
    return out.str();
}

PotentialSpec ExperimentConfig::potential(double epsilon) const {
    PotentialSpec p;
    p.family = family;
    p.width = width;
    p.epsilon = epsilon;
    p.smoothness_budget = budget;
    return p;
}

McOptions ExperimentConfig::mc_options(std::uint64_t derived_seed) const {
    McOptions mc;
    mc.n_samples = n_samples;
    mc.seed = derived_seed;
    mc.n_grid = grid;
    mc.chunk = chunk;
    mc.threads = threads;
    return mc;
}

}  // namespace phi4::cli
