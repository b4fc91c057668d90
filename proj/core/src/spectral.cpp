#include "phi4/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <set>
#include <sstream>
#include <vector>
#include <stdexcept>

#include "fftw_lock.hpp"

namespace phi4 {

ModeSet build_mode_set(double cutoff) {
    if (cutoff < 1.0) {
        throw std::domain_error("build_mode_set: cutoff must be >= 1 (k = 0 must be included)");
    }
    ModeSet m;
    m.cutoff = cutoff;
    const int r = static_cast<int>(std::floor(std::sqrt(std::max(0.0, cutoff - 1.0))));
    for (int k1 = -r; k1 <= r; ++k1) {
        for (int k2 = -r; k2 <= r; ++k2) {
            const double k2norm = double(k1) * k1 + double(k2) * k2;
            if (k2norm + 1.0 <= cutoff) {
                m.modes.push_back({k1, k2});
            }
        }
    }
    std::sort(m.modes.begin(), m.modes.end());
    m.eigenvalues.reserve(m.modes.size());
    for (std::size_t i = 0; i < m.modes.size(); ++i) {
        const Mode& k = m.modes[i];
        m.eigenvalues.push_back(double(k[0]) * k[0] + double(k[1]) * k[1] + 1.0);
        m.index_.emplace(k, static_cast<int>(i));
        m.max_abs_ = std::max({m.max_abs_, std::abs(k[0]), std::abs(k[1])});
    }
    return m;
}

ModeSet build_mode_set_explicit(std::vector<Mode> modes) {
    if (modes.empty()) throw std::domain_error("build_mode_set_explicit: empty mode list");
    std::sort(modes.begin(), modes.end());
    modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
    ModeSet m;
    m.modes = std::move(modes);
    for (std::size_t i = 0; i < m.modes.size(); ++i) {
        const Mode& k = m.modes[i];
        m.eigenvalues.push_back(double(k[0]) * k[0] + double(k[1]) * k[1] + 1.0);
        m.index_.emplace(k, static_cast<int>(i));
        m.max_abs_ = std::max({m.max_abs_, std::abs(k[0]), std::abs(k[1])});
        m.cutoff = std::max(m.cutoff, m.eigenvalues.back());
    }
    for (const Mode& k : m.modes) {
        if (!m.contains({-k[0], -k[1]})) {
            throw std::domain_error("build_mode_set_explicit: list not closed under negation");
        }
    }
    return m;
}

std::vector<Mode> ModeSet::differences() const {
    const bool has_zero = contains({0, 0});
    std::vector<Mode> out;
    const int b = 2 * max_abs_;
    for (int k1 = -b; k1 <= b; ++k1) {
        for (int k2 = -b; k2 <= b; ++k2) {
            // cheap witnesses first (p = 0 and the midpoint), full scan last
            bool hit = has_zero && contains({k1, k2});
            if (!hit) {
                const Mode p0{-k1 / 2, -k2 / 2};
                hit = contains(p0) && contains({p0[0] + k1, p0[1] + k2});
            }
            if (!hit) {
                for (const Mode& p : modes) {
                    if (contains({p[0] + k1, p[1] + k2})) {
                        hit = true;
                        break;
                    }
                }
            }
            if (hit) out.push_back({k1, k2});
        }
    }
    return out;
}

double PotentialSpec::w_hat_sq(double k2) const {
    switch (family) {
        case Family::Gaussian:
            return std::exp(-width * width * k2);
        case Family::PointK0:
            return k2 == 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

void PotentialSpec::validate(const std::vector<Mode>& support) const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::domain_error("PotentialSpec: epsilon must be in (0,1]");
    }
    if (w_hat_sq(0.0) != 1.0) {
        throw std::domain_error("PotentialSpec: w_hat(0) must equal 1");
    }
    double budget_sum = 0.0;
    for (const Mode& k : support) {
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
        const double w = w_hat_sq(k2);
        if (w < 0.0) throw std::domain_error("PotentialSpec: w_hat must be nonnegative");
        budget_sum += w * (1.0 + k2);
    }
    if (!(budget_sum <= smoothness_budget)) {
        std::ostringstream msg;
        msg << "PotentialSpec: truncated smoothness sum " << budget_sum
            << " exceeds budget " << smoothness_budget;
        throw std::domain_error(msg.str());
    }
}

double green_sq_coeff(const ModeSet& m, const Mode& k) {
    double s = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const Mode& p = m.modes[i];
        const Mode q{k[0] - p[0], k[1] - p[1]};
        const int j = m.index_of(q);
        if (j >= 0) s += 1.0 / (m.eigenvalues[i] * m.eigenvalues[j]);
    }
    return s;
}

RenormConstants renorm_constants(const ModeSet& m, const PotentialSpec& p, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("renorm_constants: lambda must be > 0");
    if (m.size() > 5000) {
        throw ConfigError(
            "renorm_constants: mode set too large for the O(K^2) convolution; "
            "use counterterm_asymptotics for large-cutoff scans");
    }
    p.validate(m.differences());
    RenormConstants rc;
    rc.lambda = lambda;
    for (int i = 0; i < m.size(); ++i) {
        rc.c_K += 1.0 / m.eigenvalues[i];
        rc.tau += p.w_hat_eps(m.modes[i]) / m.eigenvalues[i];
        rc.n0 += 1.0 / std::expm1(lambda * m.eigenvalues[i]);
    }
    for (const Mode& k : m.differences()) {
        rc.e_const += 0.5 * p.w_hat_eps(k) * green_sq_coeff(m, k);
    }
    return rc;
}

double green_truncated(const std::array<double, 2>& x, const ModeSet& m) {
    std::complex<double> s = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const Mode& k = m.modes[i];
        const double phase = k[0] * x[0] + k[1] * x[1];
        s += std::complex<double>(std::cos(phase), std::sin(phase)) / m.eigenvalues[i];
    }
    if (std::abs(s.imag()) >= 1e-12) {
        throw std::logic_error("green_truncated: imaginary part failed to cancel");
    }
    return s.real();
}

namespace {

// sum_k w_hat(eps k) F[G_K^2](k) through an exact even-even (DCT-I)
// convolution of the truncated Green coefficients g(k) = 1/(|k|^2+1) on
// |k|^2 <= r2max.  The quarter grid has M = P/2 + 1 points per axis with
// period P >= 4 kmax + 2, so the self-convolution never wraps.
double weighted_green_sq_sum(const PotentialSpec& family, double eps, double r2max) {
    const int kmax = static_cast<int>(std::floor(std::sqrt(std::max(0.0, r2max))));
    int half = 2 * kmax + 1;
    half += (16 - half % 16) % 16;  // friendlier transform sizes
    const int M = half + 1;
    const double P = 2.0 * half;

    std::vector<double> a(static_cast<std::size_t>(M) * M, 0.0);
    for (int i = 0; i <= kmax; ++i) {
        for (int j = 0; j <= kmax; ++j) {
            const double kk = double(i) * i + double(j) * j;
            if (kk <= r2max) a[static_cast<std::size_t>(i) * M + j] = 1.0 / (kk + 1.0);
        }
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_r2r_2d(M, M, a.data(), a.data(), FFTW_REDFT00, FFTW_REDFT00,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);                      // -> G on the quarter grid
    for (double& v : a) v *= v;              // -> G^2 pointwise
    fftw_execute(plan);                      // -> P^2 F[G^2] on the quarter grid
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double inv = 1.0 / (P * P);
    double total = 0.0;
    const int support = 2 * kmax;  // F[G^2] vanishes beyond it
    for (int i = 0; i <= support; ++i) {
        double row = 0.0;
        for (int j = 0; j <= support; ++j) {
            const double coeff = a[static_cast<std::size_t>(i) * M + j] * inv;
            const double w = family.w_hat_sq(eps * eps * (double(i) * i + double(j) * j));
            double mult = 4.0;
            if (i == 0 && j == 0) mult = 1.0;
            else if (i == 0 || j == 0) mult = 2.0;
            row += mult * w * coeff;
        }
        total += row;
    }
    return total;
}

}  // namespace

double n0_full_lattice(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("n0_full_lattice: lambda must be > 0");
    // Terms with lambda*|k|^2 > 45 contribute < 3e-20 each; radius chosen so
    // the discarded tail is below 1e-12 relative.
    const double x_cut = 45.0;
    const long r = static_cast<long>(std::sqrt(x_cut / lambda)) + 2;
    // octant sum: 0 <= k2 <= k1 with multiplicities 8 / 4 / 1
    double total = 0.0;
    for (long k1 = 0; k1 <= r; ++k1) {
        for (long k2 = 0; k2 <= k1; ++k2) {
            const double x = lambda * (double(k1) * k1 + double(k2) * k2 + 1.0);
            if (x > x_cut) break;
            const double term = 1.0 / std::expm1(x);
            double mult = 8.0;
            if (k1 == 0 && k2 == 0) mult = 1.0;
            else if (k2 == 0 || k2 == k1) mult = 4.0;
            total += mult * term;
        }
    }
    return total;
}

std::vector<CountertermPoint> counterterm_asymptotics(const PotentialSpec& family,
                                                      const std::vector<double>& eps_list,
                                                      double cutoff_factor) {
    std::vector<CountertermPoint> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        if (!(eps > 0.0 && eps <= 1.0)) {
            throw std::domain_error("counterterm_asymptotics: eps must be in (0,1]");
        }
        CountertermPoint pt;
        pt.epsilon = eps;
        pt.cutoff = cutoff_factor / (eps * eps);
        const double r2max = pt.cutoff - 1.0;
        const long r = static_cast<long>(std::floor(std::sqrt(std::max(0.0, r2max))));
        // tau: octant sum over the mode disc
        double tau = 0.0;
        for (long k1 = 0; k1 <= r; ++k1) {
            for (long k2 = 0; k2 <= k1; ++k2) {
                const double kk = double(k1) * k1 + double(k2) * k2;
                if (kk > r2max) break;
                double mult = 8.0;
                if (k1 == 0 && k2 == 0) mult = 1.0;
                else if (k2 == 0 || k2 == k1) mult = 4.0;
                tau += mult * family.w_hat_sq(eps * eps * kk) / (kk + 1.0);
            }
        }
        pt.tau = tau;
        pt.e_const = 0.5 * weighted_green_sq_sum(family, eps, r2max);
        out.push_back(pt);
    }
    return out;
}

std::vector<N0Row> n0_asymptotics_check(const std::vector<double>& lambdas) {
    std::vector<N0Row> rows;
    rows.reserve(lambdas.size());
    for (double lam : lambdas) {
        if (!(lam > 0.0 && lam < 1.0)) {
            throw std::domain_error("n0_asymptotics_check: lambda must be in (0,1)");
        }
        N0Row row;
        row.lambda = lam;
        row.n0_full = n0_full_lattice(lam);
        row.ratio = row.n0_full * lam / (kTorusVolume * std::abs(std::log(lam)));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace phi4
