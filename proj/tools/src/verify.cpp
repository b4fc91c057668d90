#include "verify.hpp"

#include <cmath>
#include <functional>

#include "phi4/coherent.hpp"
#include "phi4/fock.hpp"
#include "phi4/free_energy.hpp"

namespace phi4::cli {

namespace {

using Checks = std::vector<CheckResult>;

void push(Checks& out, const std::string& suite, const std::string& name, double value,
          double bound, bool pass, std::string detail = {}) {
    out.push_back({suite, name, pass, value, bound, std::move(detail)});
}

PotentialSpec pot(const ExperimentConfig& cfg, double eps) { return cfg.potential(eps); }

// ---------------------------------------------------------------- spectral --

void suite_spectral(Checks& out, const ExperimentConfig& cfg) {
    const std::string s = "spectral";
    {
        const ModeSet m = build_mode_set(5.5);
        push(out, s, "mode_count_cutoff_5.5", m.size(), 13, m.size() == 13);
    }
    {
        const ModeSet m = build_mode_set(2.0);
        const double g = green_truncated({kPi, kPi}, m);
        push(out, s, "green_five_modes_at_pi", g, -1.0, std::abs(g + 1.0) < 1e-12);
    }
    {
        const ModeSet m = build_mode_set(30.0);
        const RenormConstants rc = renorm_constants(m, pot(cfg, 0.5), 1.0);
        const double g0 = green_truncated({0.0, 0.0}, m);
        push(out, s, "green_origin_equals_wick_mass", g0, rc.c_K,
             std::abs(g0 - rc.c_K) < 1e-12 * rc.c_K);
    }
    {
        const ModeSet m = build_mode_set(1e4);
        const double r = 0.05;
        const double ratio = green_truncated({r, 0.0}, m) / (-2.0 * kPi * std::log(r));
        push(out, s, "green_log_law_ratio", ratio, 1.0, ratio > 0.8 && ratio < 1.2,
             "window [0.8, 1.2]");
    }
    {
        std::vector<double> eps_list;
        for (int j = 3; j <= 8; ++j) eps_list.push_back(std::pow(2.0, -j));
        const auto pts = counterterm_asymptotics(pot(cfg, 1.0), eps_list, 4.0);
        const double tau_drift = [&] {
            const auto& a = pts[pts.size() - 2];
            const auto& b = pts.back();
            return std::abs((b.tau / std::abs(std::log(b.epsilon))) /
                                (a.tau / std::abs(std::log(a.epsilon))) -
                            1.0);
        }();
        const double e_drift = [&] {
            const auto& a = pts[pts.size() - 2];
            const auto& b = pts.back();
            return std::abs((b.e_const / std::pow(std::log(b.epsilon), 2)) /
                                (a.e_const / std::pow(std::log(a.epsilon), 2)) -
                            1.0);
        }();
        push(out, s, "tau_over_log_eps_drift", tau_drift, 0.10, tau_drift < 0.10);
        push(out, s, "e_over_log_eps_sq_drift", e_drift, 0.10, e_drift < 0.10);
    }
    {
        const auto rows = n0_asymptotics_check({1e-5});
        const double target = 1.0 / (4.0 * kPi);
        push(out, s, "n0_density_coefficient", rows[0].ratio, target,
             rows[0].ratio >= 0.0756 && rows[0].ratio <= 0.0836, "window [0.0756, 0.0836]");
    }
}

// ---------------------------------------------------------------- classical --

void suite_classical(Checks& out, const ExperimentConfig& cfg) {
    const std::string s = "classical";
    const ModeSet m = build_mode_set(10.0);
    const PotentialSpec p = pot(cfg, 0.2);
    const RenormConstants rc = renorm_constants(m, p, 0.7);
    const int n_grid = auto_grid(m);
    {
        // Parseval roundtrip
        RngStream rng(derive_seed(cfg.seed, 1), 0);
        const FieldSample f = sample_free_field(m, rng);
        const GridField g = to_grid(f, n_grid);
        const auto coeffs = grid_coefficients(g);
        double worst = 0.0;
        for (int i = 0; i < m.size(); ++i) {
            worst = std::max(worst, std::abs(coeff_at(coeffs, n_grid, m.modes[i]) - f.alpha[i]));
        }
        push(out, s, "grid_roundtrip_exact", worst, 1e-12, worst < 1e-12);
    }
    {
        // mean-zero calibration of W over 2e4 samples
        const std::int64_t n = 20000;
        double acc = 0.0, acc2 = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(derive_seed(cfg.seed, 2), static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            const double w = interaction_w(f, p, rc, n_grid);
            acc += w;
            acc2 += w * w;
        }
        const double mean = acc / n;
        const double se = std::sqrt((acc2 / n - mean * mean) / n);
        push(out, s, "w_mean_zero_3sigma", mean, 3.0 * se, std::abs(mean) < 3.0 * se);
    }
    {
        double worst = 0.0;
        double worst_dual = 0.0;
        for (std::uint64_t i = 0; i < 25; ++i) {
            RngStream rng(derive_seed(cfg.seed, 3), i);
            const FieldSample f = sample_free_field(m, rng);
            const double w = interaction_w(f, p, rc, n_grid);
            const double v = interaction_v_smeared(f, p, rc, n_grid);
            const double cx = cross_term_i(f, p, rc, n_grid);
            const double scale = std::max({1.0, std::abs(v), std::abs(w)});
            worst = std::max(worst, std::abs(v - w - cx) / scale);
            const double wd = reference::interaction_w_direct(f, p, rc);
            worst_dual = std::max(worst_dual, std::abs(w - wd) / std::max(1.0, std::abs(wd)));
        }
        push(out, s, "identity_v_equals_w_plus_i", worst, 1e-8, worst < 1e-8);
        push(out, s, "fft_vs_direct_sums", worst_dual, 1e-8, worst_dual < 1e-8);
    }
    {
        const double bound = w_lower_bound(p, rc);
        double min_w = 1e300;
        for (std::uint64_t i = 0; i < 200; ++i) {
            RngStream rng(derive_seed(cfg.seed, 4), i);
            const FieldSample f = sample_free_field(m, rng);
            min_w = std::min(min_w, interaction_w(f, p, rc, n_grid));
        }
        push(out, s, "young_lower_bound", min_w, bound, min_w >= bound - 1e-10);
    }
    {
        // ||I|| Monte Carlo against the exact diagonal formula
        const std::int64_t n = 20000;
        double acc = 0.0, acc2 = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(derive_seed(cfg.seed, 5), static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            const double cx = cross_term_i(f, p, rc, n_grid);
            acc += cx * cx;
            acc2 += cx * cx * cx * cx;
        }
        const double mean = acc / n;
        const double se = std::sqrt((acc2 / n - mean * mean) / n);
        const double exact = i_norm_exact(m, p, rc);
        push(out, s, "i_norm_mc_vs_exact", mean, exact * exact,
             std::abs(mean - exact * exact) < 3.0 * se);
    }
    {
        // Jensen: -log Z <= E[F]
        McOptions mc = cfg.mc_options(derive_seed(cfg.seed, 6));
        mc.n_samples = std::min<std::int64_t>(mc.n_samples, 20000);
        const auto est = estimate_relative_partition(Functional::WickSmeared, m, p, rc, mc);
        push(out, s, "jensen_bound", est.value, est.mean_f,
             est.value <= est.mean_f + 3.0 * (est.std_error + est.mean_f_se));
    }
}

// ------------------------------------------------------------------ quantum --

void suite_quantum(Checks& out, const ExperimentConfig& cfg) {
    const std::string s = "quantum";
    {
        const ModeSet m1 = build_mode_set(1.0);
        const FockBasis b = FockBasis::build(1, 40);
        const GibbsResult g = gibbs_state(free_hamiltonian(b, m1, 1.0));
        const double want = -std::log(-std::expm1(-1.0));
        push(out, s, "geometric_partition_function", g.log_partition, want,
             std::abs(g.log_partition - want) < 1e-14 * std::abs(want));
    }
    const ModeSet m = build_mode_set(2.0);
    const PotentialSpec p = pot(cfg, 0.7);
    const double lam = 0.5;
    const RenormConstants rc = renorm_constants(m, p, lam);
    const FockBasis b = FockBasis::build(m.size(), 3);
    const Op lamH = build_renormalized_hamiltonian(b, m, p, rc, lam);
    const GibbsResult g = gibbs_state(lamH);
    {
        const double herm = (lamH - lamH.adjoint()).cwiseAbs().maxCoeff();
        push(out, s, "hamiltonian_hermitian", herm, 1e-11, herm < 1e-11);
        const double comm = (g.state.matrix * lamH - lamH * g.state.matrix).cwiseAbs().maxCoeff();
        push(out, s, "gibbs_commutes_with_hamiltonian", comm, 1e-10, comm < 1e-10);
    }
    {
        bool beats_all = true;
        double worst_margin = 1e300;
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            RngStream rng(derive_seed(cfg.seed, 7), trial);
            Op a(b.dim(), b.dim());
            for (int i = 0; i < b.dim(); ++i)
                for (int j = 0; j < b.dim(); ++j)
                    a(i, j) = Complex(rng.next_normal(), rng.next_normal());
            Op rho = a * a.adjoint();
            rho /= rho.trace().real();
            Eigen::SelfAdjointEigenSolver<Op> es(rho);
            double entropy = 0.0;
            for (int i = 0; i < es.eigenvalues().size(); ++i) {
                const double pi = es.eigenvalues()(i);
                if (pi > 1e-300) entropy += pi * std::log(pi);
            }
            const double value = (lamH * rho).trace().real() + entropy;
            worst_margin = std::min(worst_margin, value - (-g.log_partition));
            beats_all = beats_all && value >= -g.log_partition - 1e-9;
        }
        push(out, s, "gibbs_beats_20_trial_states", worst_margin, -1e-9, beats_all);
    }
    {
        const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lam));
        const double h_rel = relative_entropy(g.state.matrix, g0.state.matrix);
        push(out, s, "relative_entropy_nonnegative", h_rel, 0.0, h_rel >= -1e-10);
        // data processing under P-localization, K = 5 -> 1
        const FockBasis sub = FockBasis::build(1, 3);
        const Op gp = p_localize(b, g.state.matrix, {0}, sub);
        const Op g0p = p_localize(b, g0.state.matrix, {0}, sub);
        const double h_loc = relative_entropy(gp, g0p);
        push(out, s, "entropy_monotone_under_localization", h_loc, h_rel, h_loc <= h_rel + 1e-9);
    }
    {
        const ModeSet m2 = build_mode_set_explicit({{1, 0}, {-1, 0}});
        const FockBasis b2 = FockBasis::build(2, 15);
        const GibbsResult g0 = gibbs_state(free_hamiltonian(b2, m2, 1.1));
        const Op num = number_operator(b2);
        const double mean = (num * g0.state.matrix).trace().real();
        double want = 0.0;
        for (double lk : m2.eigenvalues) {
            const double x = 1.1 * lk;
            want += std::exp(x) / (std::expm1(x) * std::expm1(x));
        }
        const double got = variance_observable(g0.state.matrix, num, mean);
        push(out, s, "number_variance_formula", got, want, std::abs(got - want) < 1e-5 * want);
    }
}

// -------------------------------------------------------------- semiclassics --

void suite_semiclassics(Checks& out, const ExperimentConfig& cfg) {
    const std::string s = "semiclassics";
    const ModeSet m = build_mode_set(1.0);
    const FockBasis b = FockBasis::build(1, 40);
    for (double lambda : {1.0, 0.3}) {
        const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lambda));
        RngStream rng(derive_seed(cfg.seed, 8), 0);
        double worst = 0.0;
        for (int pt = 0; pt < 20; ++pt) {
            const Eigen::VectorXcd u = sample_free_husimi(m, lambda, rng);
            const double generic = lower_symbol_density(g0.state.matrix, u, lambda, b, 2.0);
            const double oracle = free_gibbs_husimi_oracle(u, lambda, m);
            const double q = std::exp(-lambda);
            const double defect = 2.0 * std::pow(q, b.n_max() + 1) +
                                  poisson_tail(u.squaredNorm() / lambda, b.n_max());
            const double rel = std::abs(generic - oracle) / oracle - 4.0 * defect;
            worst = std::max(worst, rel);
        }
        push(out, s, "husimi_oracle_lambda_" + std::to_string(lambda), worst, 1e-8, worst <= 1e-8);
    }
    {
        const double lambda = 0.5;
        const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lambda));
        for (int k : {1, 2}) {
            const DeFinettiResult r = definetti_check(g0.state.matrix, b, m, lambda, k,
                                                      std::min<std::int64_t>(cfg.n_samples, 40000),
                                                      derive_seed(cfg.seed, 9));
            push(out, s, "definetti_residual_k" + std::to_string(k), r.residual,
                 3.0 * r.mc_sigma + r.defect, r.residual <= 3.0 * r.mc_sigma + r.defect + 1e-12);
            push(out, s, "definetti_bound_k" + std::to_string(k), r.bound_lhs, r.bound_rhs,
                 r.bound_lhs <= r.bound_rhs + 1e-12);
        }
    }
    {
        const double lambda = 0.7;
        const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lambda));
        const double m1 = berezin_lieb_first(g0.state.matrix, lambda, b, ConvexTest::XLogX);
        push(out, s, "berezin_lieb_first_xlogx", m1, -1e-8, m1 >= -1e-8);
        const double m2 = berezin_lieb_first(g0.state.matrix, lambda, b, ConvexTest::Square);
        push(out, s, "berezin_lieb_first_square", m2, -1e-8, m2 >= -1e-8);
        const RadialDensity r = [](double t) { return 0.6 * std::exp(-0.6 * t); };
        const double m3 = berezin_lieb_second(r, lambda, b, ConvexTest::XLogX, 400.0);
        push(out, s, "berezin_lieb_second_xlogx", m3, -1e-8, m3 >= -1e-8);
    }
    {
        // sandwich: quantum relative entropy dominates the classical one
        const double lambda = 0.4;
        const PotentialSpec p = pot(cfg, 0.9);
        const RenormConstants rc = renorm_constants(m, p, lambda);
        const GibbsResult g0 = gibbs_state(free_hamiltonian(b, m, lambda));
        const GibbsResult gl = gibbs_state(build_renormalized_hamiltonian(b, m, p, rc, lambda));
        const double quantum = relative_entropy(gl.state.matrix, g0.state.matrix);
        const HclEstimate cl = classical_relative_entropy_mc(
            gl.state.matrix, g0.state.matrix, b, m, lambda, 20000, derive_seed(cfg.seed, 10));
        push(out, s, "sandwich_quantum_dominates_classical", quantum - cl.value,
             -3.0 * cl.std_error, quantum >= cl.value - 3.0 * cl.std_error);
    }
}

}  // namespace

std::vector<CheckResult> run_suite(const std::string& suite, const ExperimentConfig& cfg) {
    Checks out;
    bool known = false;
    if (suite == "spectral" || suite == "all") {
        suite_spectral(out, cfg);
        known = true;
    }
    if (suite == "classical" || suite == "all") {
        suite_classical(out, cfg);
        known = true;
    }
    if (suite == "quantum" || suite == "all") {
        suite_quantum(out, cfg);
        known = true;
    }
    if (suite == "semiclassics" || suite == "all") {
        suite_semiclassics(out, cfg);
        known = true;
    }
    if (!known) throw ConfigError("verify: unknown suite '" + suite + "'");
    return out;
}

}  // namespace phi4::cli
