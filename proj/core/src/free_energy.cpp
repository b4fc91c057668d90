#include "phi4/free_energy.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace phi4 {

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GIBBS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct KahanSum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// per-chunk accumulator in shifted exponential space
struct ChunkAcc {
    double max_log_w = -std::numeric_limits<double>::infinity();
    KahanSum s1;    // sum exp(log w - max)
    KahanSum s2;    // sum exp(2(log w - max))
    KahanSum f;     // sum F
    KahanSum f2;    // sum F^2
    std::vector<double> log_w;  // second pass inputs
};

}  // namespace

FreeEnergyEstimate estimate_relative_partition(Functional functional, const ModeSet& m,
                                               const PotentialSpec& p, const RenormConstants& rc,
                                               const McOptions& opt) {
    const int n_grid = opt.n_grid > 0 ? opt.n_grid : auto_grid(m);
    switch (functional) {
        case Functional::WickSmeared:
            return estimate_relative_partition(
                [&p, &rc, n_grid](const FieldSample& u) { return interaction_w(u, p, rc, n_grid); },
                m, opt);
        case Functional::QuarticLocal:
            return estimate_relative_partition(
                [&rc, n_grid](const FieldSample& u) {
                    return interaction_v_local(u, rc.c_K, n_grid);
                },
                m, opt);
        case Functional::SmearedQuartic:
            return estimate_relative_partition(
                [&p, &rc, n_grid](const FieldSample& u) {
                    return interaction_v_smeared(u, p, rc, n_grid);
                },
                m, opt);
    }
    throw std::logic_error("estimate_relative_partition: unknown functional");
}

FreeEnergyEstimate estimate_relative_partition(const FieldFunctional& functional, const ModeSet& m,
                                               const McOptions& opt) {
    if (opt.n_samples < 100) {
        throw std::domain_error("estimate_relative_partition: n_samples must be >= 100");
    }
    const std::int64_t n = opt.n_samples;
    const std::int64_t chunk = std::max<std::int64_t>(1, opt.chunk);
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;

    std::vector<ChunkAcc> accs(static_cast<std::size_t>(n_chunks));
    const int n_threads = std::min<std::int64_t>(resolve_thread_count(opt.threads), n_chunks);

    auto run_chunk = [&](std::int64_t c) {
        ChunkAcc& acc = accs[static_cast<std::size_t>(c)];
        const std::int64_t begin = c * chunk;
        const std::int64_t end = std::min(n, begin + chunk);
        acc.log_w.reserve(static_cast<std::size_t>(end - begin));
        for (std::int64_t i = begin; i < end; ++i) {
            RngStream rng(opt.seed, static_cast<std::uint64_t>(i));
            const FieldSample u = sample_free_field(m, rng);
            const double F = functional(u);
            acc.log_w.push_back(-F);
            acc.max_log_w = std::max(acc.max_log_w, -F);
            acc.f.add(F);
            acc.f2.add(F * F);
        }
        for (double lw : acc.log_w) {
            acc.s1.add(std::exp(lw - acc.max_log_w));
            acc.s2.add(std::exp(2.0 * (lw - acc.max_log_w)));
        }
        acc.log_w.clear();
        acc.log_w.shrink_to_fit();
    };

    if (n_threads <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> workers;
        std::atomic<std::int64_t> next{0};
        for (int t = 0; t < n_threads; ++t) {
            workers.emplace_back([&] {
                for (std::int64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
                    run_chunk(c);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    // merge chunks in fixed order under a global shift
    double gmax = -std::numeric_limits<double>::infinity();
    for (const ChunkAcc& a : accs) gmax = std::max(gmax, a.max_log_w);
    KahanSum S1, S2, SF, SF2;
    for (const ChunkAcc& a : accs) {
        const double r = std::exp(a.max_log_w - gmax);
        S1.add(r * a.s1.sum);
        S2.add(r * r * a.s2.sum);
        SF.add(a.f.sum);
        SF2.add(a.f2.sum);
    }

    FreeEnergyEstimate est;
    est.n_samples = n;
    const double nd = static_cast<double>(n);
    const double mean_shifted = S1.sum / nd;  // e^{-gmax} * mean weight
    est.value = -(gmax + std::log(mean_shifted));
    // delta method: se(-log m) = sd(w)/(m sqrt(n)), scale-invariant in the shift
    const double var_shifted = std::max(0.0, S2.sum / nd - mean_shifted * mean_shifted);
    est.std_error = std::sqrt(var_shifted / nd) / mean_shifted;
    est.ess = (S1.sum * S1.sum) / std::max(S2.sum, 1e-300);
    est.heavy_tail_warning = est.ess < 0.01 * nd;
    est.mean_f = SF.sum / nd;
    const double var_f = std::max(0.0, SF2.sum / nd - est.mean_f * est.mean_f);
    est.mean_f_se = std::sqrt(var_f / nd);
    return est;
}

std::vector<ScanPoint> joint_limit_scan(const ScanSettings& s) {
    if (s.theorem_mode) {
        if (!(s.eta > 0.0 && s.eta < 1.0 / 24.0)) {
            std::ostringstream msg;
            msg << "joint_limit_scan: eta = " << s.eta
                << " violates the theorem condition eta in (0, 1/24)";
            throw ConfigError(msg.str());
        }
        if (!(s.nu > 8.0 * s.eta && s.nu < 1.0 / 3.0)) {
            std::ostringstream msg;
            msg << "joint_limit_scan: nu = " << s.nu
                << " violates the theorem condition 8*eta < nu < 1/3 (eta = " << s.eta << ")";
            throw ConfigError(msg.str());
        }
    } else if (!(s.eta > 0.0 && s.nu > 0.0)) {
        throw ConfigError("joint_limit_scan: eta and nu must be positive");
    }
    for (std::size_t i = 1; i < s.lambdas.size(); ++i) {
        if (!(s.lambdas[i] < s.lambdas[i - 1])) {
            throw ConfigError("joint_limit_scan: lambda_list must be strictly decreasing");
        }
    }

    const ModeSet ref_modes = build_mode_set(s.reference_cutoff);
    // the reference -log Z(V_K) has no lambda or eps dependence: one estimate,
    // shared by every scan point
    FreeEnergyEstimate reference;
    {
        PotentialSpec pot;
        pot.family = s.family;
        pot.width = s.width;
        pot.epsilon = 1.0;
        const RenormConstants rc_ref = renorm_constants(ref_modes, pot, 1.0);
        McOptions mc = s.mc;
        mc.seed = derive_seed(s.mc.seed, 0x5eedu);
        reference = estimate_relative_partition(Functional::QuarticLocal, ref_modes, pot, rc_ref, mc);
    }
    std::vector<ScanPoint> points;
    points.reserve(s.lambdas.size());
    for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
        const double lam = s.lambdas[i];
        ScanPoint pt;
        pt.lambda = lam;
        pt.epsilon = std::pow(lam, s.eta);
        pt.cutoff = std::max(1.0, std::pow(lam, -s.nu));

        PotentialSpec pot;
        pot.family = s.family;
        pot.width = s.width;
        pot.epsilon = pt.epsilon;

        const ModeSet m = build_mode_set(pt.cutoff);
        pt.n_modes = m.size();
        const RenormConstants rc = renorm_constants(m, pot, lam);

        McOptions mc = s.mc;
        mc.seed = derive_seed(s.mc.seed, i);
        pt.smeared = estimate_relative_partition(Functional::WickSmeared, m, pot, rc, mc);
        pt.reference = reference;

        pt.gap = std::abs(pt.smeared.value - pt.reference.value);
        pt.gap_se = std::hypot(pt.smeared.std_error, pt.reference.std_error);
        const double log_eps = std::abs(std::log(pt.epsilon));
        pt.tau_over_log_eps = log_eps > 0.0 ? rc.tau / log_eps : 0.0;
        pt.e_over_log_eps_sq = log_eps > 0.0 ? rc.e_const / (log_eps * log_eps) : 0.0;
        pt.i_norm = i_norm_exact(m, pot, rc);
        points.push_back(pt);
    }
    return points;
}

}  // namespace phi4
