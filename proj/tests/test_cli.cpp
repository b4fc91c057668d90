#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

std::string binary() {
    const char* b = std::getenv("PHI4GIBBS_BIN");
    REQUIRE(b != nullptr);
    return b;
}

int run(const std::string& args, const std::string& log = "/dev/null") {
    const std::string cmd = binary() + " " + args + " >" + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("phi4gibbs_test_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    out << s;
}

std::string small_config(const std::string& out_dir, int n_samples = 3000,
                         const std::string& mode = "theorem") {
    std::ostringstream cfg;
    cfg << "[run]\nmode = " << mode << "\nseed = 7\nout = " << out_dir << "\n";
    cfg << "[scan]\nlambda_list = 0.5 0.3 0.2 0.1\neta = 0.04\nnu = 0.33\n"
        << "reference_cutoff = 10.0\n";
    cfg << "[compare]\ncutoff = 1.0\n";
    cfg << "[mc]\nn_samples = " << n_samples << "\n";
    return cfg.str();
}

}  // namespace

TEST_CASE("compare rerun with identical config and seed is byte-identical") {
    const fs::path d = fresh_dir("determinism");
    write(d / "exp.ini", small_config((d / "a").string()));
    REQUIRE(run("compare --config " + (d / "exp.ini").string()) == 0);
    const std::string first = slurp(d / "a" / "compare.csv");
    fs::remove_all(d / "a");
    REQUIRE(run("compare --config " + (d / "exp.ini").string()) == 0);
    const std::string second = slurp(d / "a" / "compare.csv");
    REQUIRE(first == second);
    REQUIRE(first.find("lambda,epsilon,cutoff") == 0);
    SECTION("thread count does not change the bytes") {
        fs::remove_all(d / "a");
        const std::string cmd1 = "GIBBS_THREADS=1 " + binary() + " compare --config " +
                                 (d / "exp.ini").string() + " >/dev/null 2>&1";
        REQUIRE(std::system(cmd1.c_str()) == 0);
        const std::string third = slurp(d / "a" / "compare.csv");
        REQUIRE(first == third);
    }
    SECTION("a different seed changes the bytes") {
        fs::remove_all(d / "a");
        REQUIRE(run("compare --config " + (d / "exp.ini").string() + " --seed 8") == 0);
        REQUIRE(slurp(d / "a" / "compare.csv") != first);
    }
}

TEST_CASE("theorem-mode exponent validation is a configuration error") {
    const fs::path d = fresh_dir("validation");
    std::string cfg = small_config((d / "out").string());
    cfg.replace(cfg.find("eta = 0.04"), 10, "eta = 0.05");  // > 1/24
    write(d / "bad.ini", cfg);
    const fs::path log = d / "log.txt";
    REQUIRE(run("scan-classical --config " + (d / "bad.ini").string(), log.string()) == 2);
    const std::string msg = slurp(log);
    REQUIRE(msg.find("1/24") != std::string::npos);
    SECTION("nu window violation names the condition") {
        std::string cfg2 = small_config((d / "out").string());
        cfg2.replace(cfg2.find("nu = 0.33"), 9, "nu = 0.20");
        write(d / "bad2.ini", cfg2);
        REQUIRE(run("scan-classical --config " + (d / "bad2.ini").string(), log.string()) == 2);
        REQUIRE(slurp(log).find("8*eta < nu < 1/3") != std::string::npos);
    }
    SECTION("exploratory mode runs the same exponents with a warning") {
        std::string cfg3 = small_config((d / "out").string(), 500, "exploratory");
        cfg3.replace(cfg3.find("eta = 0.04"), 10, "eta = 0.05");
        write(d / "ok.ini", cfg3);
        REQUIRE(run("scan-classical --config " + (d / "ok.ini").string(), log.string()) == 0);
        REQUIRE(slurp(log).find("warning") != std::string::npos);
    }
}

TEST_CASE("unknown verify suite is a configuration error") {
    REQUIRE(run("verify --suite nonsense") == 2);
}

TEST_CASE("malformed config lines are rejected with the line number") {
    const fs::path d = fresh_dir("malformed");
    write(d / "bad.ini", "[run]\nseed 7\n");
    const fs::path log = d / "log.txt";
    REQUIRE(run("verify --suite spectral --config " + (d / "bad.ini").string(), log.string()) == 2);
    REQUIRE(slurp(log).find("bad.ini:2") != std::string::npos);
    SECTION("unknown keys are rejected") {
        write(d / "bad2.ini", "[run]\nturbo = yes\n");
        REQUIRE(run("verify --suite spectral --config " + (d / "bad2.ini").string(),
                    log.string()) == 2);
        REQUIRE(slurp(log).find("unknown key") != std::string::npos);
    }
}

TEST_CASE("plot command") {
    const fs::path d = fresh_dir("plot");
    write(d / "exp.ini", small_config((d / "out").string(), 500));
    REQUIRE(run("scan-classical --config " + (d / "exp.ini").string()) == 0);

    SECTION("full scan renders one SVG per metric") {
        REQUIRE(run("plot " + (d / "out" / "scan.json").string() + " --out " +
                    (d / "plots").string()) == 0);
        REQUIRE(fs::exists(d / "plots" / "gap_vs_lambda.svg"));
        REQUIRE(fs::exists(d / "plots" / "counterterms_vs_eps.svg"));
        REQUIRE(fs::exists(d / "plots" / "i_norm_vs_eps.svg"));
        const std::string svg = slurp(d / "plots" / "gap_vs_lambda.svg");
        REQUIRE(svg.find("<polyline") != std::string::npos);  // trend line present
        SECTION("plots are deterministic") {
            const std::string again = [&] {
                fs::remove_all(d / "plots");
                REQUIRE(run("plot " + (d / "out" / "scan.json").string() + " --out " +
                            (d / "plots").string()) == 0);
                return slurp(d / "plots" / "gap_vs_lambda.svg");
            }();
            REQUIRE(svg == again);
        }
    }
    SECTION("single point gets a marker but no trend line") {
        std::string cfg = small_config((d / "single").string(), 500);
        cfg.replace(cfg.find("lambda_list = 0.5 0.3 0.2 0.1"), 28, "lambda_list = 0.5");
        write(d / "single.ini", cfg);
        REQUIRE(run("scan-classical --config " + (d / "single.ini").string()) == 0);
        REQUIRE(run("plot " + (d / "single" / "scan.json").string() + " --out " +
                    (d / "single_plots").string()) == 0);
        const std::string svg = slurp(d / "single_plots" / "gap_vs_lambda.svg");
        REQUIRE(svg.find("<circle") != std::string::npos);
        REQUIRE(svg.find("<polyline") == std::string::npos);
    }
    SECTION("empty record list errors and writes nothing") {
        write(d / "empty.json",
              R"({"schema_version":"1","code_version":"x","command":"scan-classical",)"
              R"("config":"","points":[]})");
        REQUIRE(run("plot " + (d / "empty.json").string() + " --out " +
                    (d / "empty_plots").string()) == 2);
        REQUIRE(!fs::exists(d / "empty_plots" / "gap_vs_lambda.svg"));
    }
    SECTION("malformed input is a parse error") {
        write(d / "broken.json", "{not json");
        const fs::path log = d / "log.txt";
        REQUIRE(run("plot " + (d / "broken.json").string() + " --out " + (d / "x").string(),
                    log.string()) == 2);
        REQUIRE(slurp(log).find("malformed") != std::string::npos);
    }
}

TEST_CASE("verification subcommands exit cleanly") {
    REQUIRE(run("husimi") == 0);
    REQUIRE(run("definetti") == 0);
    REQUIRE(run("berezin") == 0);
}

TEST_CASE("compare honors an explicit mode list") {
    const fs::path d = fresh_dir("modes");
    std::string cfg = small_config((d / "out").string(), 1000);
    cfg += "modes = 0,0; 1,0; -1,0\n";  // appended under [mc]: wrong section
    // the modes key belongs to [compare]; place it correctly
    cfg = small_config((d / "out").string(), 1000);
    cfg.replace(cfg.find("[compare]\ncutoff = 1.0\n"), 22,
                "[compare]\ncutoff = 1.0\nmodes = 0,0; 1,0; -1,0\n");
    write(d / "exp.ini", cfg);
    REQUIRE(run("compare --config " + (d / "exp.ini").string()) == 0);
    const std::string csv = slurp(d / "out" / "compare.csv");
    // K = 3 in the n_modes column of every row
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        int commas = 0;
        std::size_t pos = 0;
        for (; pos < line.size() && commas < 3; ++pos)
            if (line[pos] == ',') ++commas;
        REQUIRE(line.substr(pos, line.find(',', pos) - pos) == "3");
    }
    REQUIRE(rows == 4);
}
