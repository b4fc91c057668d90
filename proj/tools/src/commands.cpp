#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "phi4/coherent.hpp"
#include "phi4/fock.hpp"
#include "phi4/free_energy.hpp"
#include "runresult.hpp"
#include "svg.hpp"
#include "verify.hpp"

namespace phi4::cli {

namespace {

std::string now_iso() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void print_check(const CheckResult& c) {
    std::printf("{\"suite\":\"%s\",\"check\":\"%s\",\"pass\":%s,\"value\":%.17g,\"bound\":%.17g%s%s%s}\n",
                c.suite.c_str(), c.name.c_str(), c.pass ? "true" : "false", c.value, c.bound,
                c.detail.empty() ? "" : ",\"detail\":\"", c.detail.c_str(),
                c.detail.empty() ? "" : "\"");
}

ModeSet compare_mode_set(const ExperimentConfig& cfg) {
    if (!cfg.compare_modes.empty()) return build_mode_set_explicit(cfg.compare_modes);
    return build_mode_set(cfg.compare_cutoff);
}

}  // namespace

int cmd_compare(const ExperimentConfig& cfg) {
    cfg.validate();
    const ModeSet m = compare_mode_set(cfg);
    RunResult run;
    run.command = "compare";
    run.config_snapshot = cfg.snapshot();
    run.started = now_iso();
    for (std::size_t i = 0; i < cfg.lambda_list.size(); ++i) {
        const double lam = cfg.lambda_list[i];
        PointRecord pt;
        pt.lambda = lam;
        pt.epsilon = std::pow(lam, cfg.eta);
        pt.cutoff = m.cutoff;
        pt.n_modes = m.size();
        const PotentialSpec p = cfg.potential(pt.epsilon);
        const RenormConstants rc = renorm_constants(m, p, lam);

        const QuantumFreeEnergy q =
            projected_relative_free_energy(m, p, lam, cfg.shell_tol, cfg.n_max_hint);
        pt.quantum_fe = q.value;
        pt.fock_dim = q.dim;
        pt.n_max = q.n_max;
        pt.top_shell = q.top_shell;

        const auto est = estimate_relative_partition(Functional::WickSmeared, m, p, rc,
                                                     cfg.mc_options(derive_seed(cfg.seed, i)));
        pt.classical_fe = est.value;
        pt.classical_se = est.std_error;
        pt.classical_ess = est.ess;
        pt.heavy_tail = est.heavy_tail_warning;
        pt.gap = std::abs(q.value - est.value);
        pt.gap_se = est.std_error;

        const double log_eps = std::abs(std::log(pt.epsilon));
        pt.tau_over_log_eps = log_eps > 0.0 ? rc.tau / log_eps : 0.0;
        pt.e_over_log_eps_sq = log_eps > 0.0 ? rc.e_const / (log_eps * log_eps) : 0.0;
        pt.i_norm = i_norm_exact(m, p, rc);
        run.points.push_back(pt);
        std::fprintf(stderr, "compare: lambda=%g quantum=%.8g classical=%.8g gap=%.3g\n", lam,
                     q.value, est.value, pt.gap);
    }
    run.finished = now_iso();
    write_file(cfg.out_dir + "/compare.csv", run.to_csv());
    write_file(cfg.out_dir + "/compare.json", run.to_json());
    std::printf("wrote %s/compare.csv and compare.json (%zu points)\n", cfg.out_dir.c_str(),
                run.points.size());
    return 0;
}

int cmd_scan_classical(const ExperimentConfig& cfg) {
    const std::string warning = cfg.validate();
    if (!warning.empty()) std::fprintf(stderr, "%s\n", warning.c_str());
    ScanSettings s;
    s.lambdas = cfg.lambda_list;
    s.eta = cfg.eta;
    s.nu = cfg.nu;
    s.reference_cutoff = cfg.reference_cutoff;
    s.theorem_mode = cfg.theorem_mode;
    s.family = cfg.family;
    s.width = cfg.width;
    s.mc = cfg.mc_options(cfg.seed);
    const auto pts = joint_limit_scan(s);

    RunResult run;
    run.command = "scan-classical";
    run.config_snapshot = cfg.snapshot();
    run.started = now_iso();
    for (const ScanPoint& sp : pts) {
        PointRecord pt;
        pt.lambda = sp.lambda;
        pt.epsilon = sp.epsilon;
        pt.cutoff = sp.cutoff;
        pt.n_modes = sp.n_modes;
        pt.classical_fe = sp.smeared.value;
        pt.classical_se = sp.smeared.std_error;
        pt.classical_ess = sp.smeared.ess;
        pt.heavy_tail = sp.smeared.heavy_tail_warning;
        pt.reference_fe = sp.reference.value;
        pt.reference_se = sp.reference.std_error;
        pt.reference_ess = sp.reference.ess;
        pt.gap = sp.gap;
        pt.gap_se = sp.gap_se;
        pt.tau_over_log_eps = sp.tau_over_log_eps;
        pt.e_over_log_eps_sq = sp.e_over_log_eps_sq;
        pt.i_norm = sp.i_norm;
        run.points.push_back(pt);
        std::fprintf(stderr, "scan: lambda=%g K=%d fe=%.6g ref=%.6g gap=%.4g\n", sp.lambda,
                     sp.n_modes, sp.smeared.value, sp.reference.value, sp.gap);
    }
    run.finished = now_iso();
    write_file(cfg.out_dir + "/scan.csv", run.to_csv());
    write_file(cfg.out_dir + "/scan.json", run.to_json());
    std::printf("wrote %s/scan.csv and scan.json (%zu points)\n", cfg.out_dir.c_str(),
                run.points.size());
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& suite) {
    const auto checks = run_suite(suite, cfg);
    int failures = 0;
    for (const CheckResult& c : checks) {
        print_check(c);
        if (!c.pass) ++failures;
    }
    std::printf("{\"summary\":{\"suite\":\"%s\",\"checks\":%zu,\"failures\":%d}}\n", suite.c_str(),
                checks.size(), failures);
    return failures == 0 ? 0 : 1;
}

int cmd_plot(const std::string& run_json, const std::string& out_dir) {
    const RunResult run = RunResult::from_json_file(run_json);
    if (run.points.empty()) throw ConfigError("plot: empty record list in " + run_json);

    {
        Series gap;
        gap.label = "|gap|";
        gap.draw_line = run.points.size() > 1;
        for (const PointRecord& p : run.points) {
            gap.x.push_back(p.lambda);
            gap.y.push_back(p.gap);
            gap.yerr.push_back(p.gap_se);
        }
        PlotSpec spec;
        spec.title = run.command == "compare" ? "quantum vs classical relative free energy"
                                              : "smeared vs quartic relative free energy";
        spec.x_label = "lambda";
        spec.y_label = "gap";
        spec.series = {gap};
        write_file(out_dir + "/gap_vs_lambda.svg", render_svg(spec));
    }
    {
        Series tau, e2;
        tau.label = "tau/|log eps|";
        tau.color = "#1f6fb2";
        e2.label = "E/|log eps|^2";
        e2.color = "#b23f1f";
        for (const PointRecord& p : run.points) {
            if (p.tau_over_log_eps > 0.0) {
                tau.x.push_back(p.epsilon);
                tau.y.push_back(p.tau_over_log_eps);
            }
            if (p.e_over_log_eps_sq > 0.0) {
                e2.x.push_back(p.epsilon);
                e2.y.push_back(p.e_over_log_eps_sq);
            }
        }
        tau.draw_line = tau.x.size() > 1;
        e2.draw_line = e2.x.size() > 1;
        PlotSpec spec;
        spec.title = "counterterm growth";
        spec.x_label = "epsilon";
        spec.y_label = "normalized counterterm";
        spec.series = {tau, e2};
        write_file(out_dir + "/counterterms_vs_eps.svg", render_svg(spec));
    }
    {
        Series inorm;
        inorm.label = "||I^eps_K||";
        inorm.color = "#2e7d32";
        for (const PointRecord& p : run.points) {
            inorm.x.push_back(p.epsilon);
            inorm.y.push_back(p.i_norm);
        }
        inorm.draw_line = inorm.x.size() > 1;
        PlotSpec spec;
        spec.title = "neglected cross term";
        spec.x_label = "epsilon";
        spec.y_label = "L2 norm";
        spec.series = {inorm};
        write_file(out_dir + "/i_norm_vs_eps.svg", render_svg(spec));
    }
    std::printf("wrote 3 SVG files under %s\n", out_dir.c_str());
    return 0;
}

int cmd_husimi(const ExperimentConfig& cfg) {
    const ModeSet m = build_mode_set(1.0);
    const FockBasis b = FockBasis::build(1, 40);
    int failures = 0;
    for (double lambda : {1.0, 0.3}) {
        const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lambda));
        RngStream rng(derive_seed(cfg.seed, 201), 0);
        double worst = -1e300;
        for (int pt = 0; pt < 20; ++pt) {
            const Eigen::VectorXcd u = sample_free_husimi(m, lambda, rng);
            const double generic = lower_symbol_density(g0.state.matrix, u, lambda, b, 2.0);
            const double oracle = free_gibbs_husimi_oracle(u, lambda, m);
            const double q = std::exp(-lambda);
            const double defect = 2.0 * std::pow(q, b.n_max() + 1) +
                                  poisson_tail(u.squaredNorm() / lambda, b.n_max());
            worst = std::max(worst, std::abs(generic - oracle) / oracle - 4.0 * defect);
        }
        const bool pass = worst <= 1e-8;
        if (!pass) ++failures;
        std::printf("{\"check\":\"husimi_oracle\",\"lambda\":%g,\"excess_rel_dev\":%.3g,"
                    "\"tol\":1e-8,\"pass\":%s}\n",
                    lambda, worst, pass ? "true" : "false");
    }
    return failures == 0 ? 0 : 1;
}

int cmd_definetti(const ExperimentConfig& cfg) {
    const ModeSet m = build_mode_set(1.0);
    const FockBasis b = FockBasis::build(1, 40);
    const double lambda = 0.5;
    const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lambda));
    int failures = 0;
    for (int k : {1, 2}) {
        const DeFinettiResult r =
            definetti_check(g0.state.matrix, b, m, lambda, k,
                            std::min<std::int64_t>(cfg.n_samples, 100000), derive_seed(cfg.seed, 202));
        const bool residual_ok = r.residual <= 3.0 * r.mc_sigma + r.defect + 1e-12;
        const bool bound_ok = r.bound_lhs <= r.bound_rhs + 1e-12;
        if (!residual_ok || !bound_ok) ++failures;
        std::printf("{\"check\":\"definetti\",\"k\":%d,\"residual\":%.6g,\"three_sigma\":%.6g,"
                    "\"defect\":%.3g,\"bound_lhs\":%.6g,\"bound_rhs\":%.6g,\"pass\":%s}\n",
                    k, r.residual, 3.0 * r.mc_sigma, r.defect, r.bound_lhs, r.bound_rhs,
                    (residual_ok && bound_ok) ? "true" : "false");
    }
    return failures == 0 ? 0 : 1;
}

int cmd_berezin(const ExperimentConfig& cfg) {
    (void)cfg;
    const ModeSet m = build_mode_set(1.0);
    const FockBasis b = FockBasis::build(1, 40);
    const double lambda = 0.7;
    const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lambda));
    int failures = 0;
    const auto report = [&](const char* name, double margin) {
        const bool pass = margin >= -1e-8;
        if (!pass) ++failures;
        std::printf("{\"check\":\"%s\",\"margin\":%.6g,\"tol\":-1e-8,\"pass\":%s}\n", name, margin,
                    pass ? "true" : "false");
    };
    report("berezin_first_xlogx",
           berezin_lieb_first(g0.state.matrix, lambda, b, ConvexTest::XLogX));
    report("berezin_first_square",
           berezin_lieb_first(g0.state.matrix, lambda, b, ConvexTest::Square));
    const RadialDensity r = [](double t) { return 0.6 * std::exp(-0.6 * t); };
    report("berezin_second_xlogx", berezin_lieb_second(r, lambda, b, ConvexTest::XLogX, 400.0));
    report("berezin_second_square", berezin_lieb_second(r, lambda, b, ConvexTest::Square, 400.0));
    return failures == 0 ? 0 : 1;
}

}  // namespace phi4::cli
