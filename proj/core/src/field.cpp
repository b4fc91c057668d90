#include "phi4/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fftw_lock.hpp"

namespace phi4 {

using detail::fftw_planner_mutex;

namespace {

// Plan-owning 2D complex FFT; FFTW_ESTIMATE keeps planning deterministic.
class Fft2D {
  public:
    explicit Fft2D(int n) : n_(n) {
        buf_ = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft2D() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    // in-place on a caller buffer through the plan's buffer
    void forward(std::vector<Complex>& data) { run(data, fwd_); }
    void backward(std::vector<Complex>& data) { run(data, bwd_); }

  private:
    void run(std::vector<Complex>& data, fftw_plan plan) {
        const std::size_t sz = static_cast<std::size_t>(n_) * n_;
        for (std::size_t i = 0; i < sz; ++i) {
            buf_[i][0] = data[i].real();
            buf_[i][1] = data[i].imag();
        }
        fftw_execute(plan);
        for (std::size_t i = 0; i < sz; ++i) data[i] = Complex(buf_[i][0], buf_[i][1]);
    }

    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

// per-thread plan cache, one plan per grid size actually in use
Fft2D& fft_for(int n) {
    thread_local std::vector<std::pair<int, std::unique_ptr<Fft2D>>> cache;
    for (auto& e : cache)
        if (e.first == n) return *e.second;
    cache.emplace_back(n, std::make_unique<Fft2D>(n));
    return *cache.back().second;
}

int wrap_index(int k, int n) { return ((k % n) + n) % n; }

void require_grid(const ModeSet& m, int n_grid, int factor, const char* who) {
    const int need = factor * m.max_abs_index() + 2;
    if (n_grid < need) {
        std::ostringstream msg;
        msg << who << ": n_grid = " << n_grid << " aliases band-limited data, need >= " << need;
        throw ConfigError(msg.str());
    }
}

}  // namespace

FieldSample sample_free_field(const ModeSet& m, RngStream& rng) {
    FieldSample f;
    f.mode_set = &m;
    f.alpha.resize(m.modes.size());
    for (int i = 0; i < m.size(); ++i) {
        f.alpha[i] = rng.next_complex_normal() / std::sqrt(2.0 * m.eigenvalues[i]);
    }
    return f;
}

int auto_grid(const ModeSet& m) {
    const int need = 4 * m.max_abs_index() + 2;
    int n = 2;
    while (n < need) n *= 2;
    return n;
}

GridField to_grid(const FieldSample& f, int n_grid) {
    const ModeSet& m = *f.mode_set;
    require_grid(m, n_grid, 2, "to_grid");
    GridField g;
    g.n = n_grid;
    g.values.assign(static_cast<std::size_t>(n_grid) * n_grid, Complex(0.0, 0.0));
    for (int i = 0; i < m.size(); ++i) {
        const Mode& k = m.modes[i];
        g.at(wrap_index(k[0], n_grid), wrap_index(k[1], n_grid)) += f.alpha[i];
    }
    fft_for(n_grid).backward(g.values);  // sum_k alpha_k e^{+ik.x}
    return g;
}

std::vector<Complex> grid_coefficients(const GridField& g) {
    std::vector<Complex> coeffs = g.values;
    fft_for(g.n).forward(coeffs);
    const double inv = 1.0 / (static_cast<double>(g.n) * g.n);
    for (auto& c : coeffs) c *= inv;
    return coeffs;
}

Complex coeff_at(const std::vector<Complex>& coeffs, int n, const Mode& k) {
    if (std::abs(k[0]) > n / 2 || std::abs(k[1]) > n / 2) return {0.0, 0.0};
    return coeffs[static_cast<std::size_t>(wrap_index(k[0], n)) * n + wrap_index(k[1], n)];
}

GridField wick_density(const FieldSample& f, double c_K, int n_grid) {
    require_grid(*f.mode_set, n_grid, 2, "wick_density");
    GridField g = to_grid(f, n_grid);
    for (auto& v : g.values) v = Complex(std::norm(v) - c_K, 0.0);
    return g;
}

double interaction_w(const FieldSample& f, const PotentialSpec& p, const RenormConstants& rc,
                     int n_grid) {
    const ModeSet& m = *f.mode_set;
    require_grid(m, n_grid, 4, "interaction_w");
    const GridField rho = wick_density(f, rc.c_K, n_grid);
    const std::vector<Complex> rho_hat = grid_coefficients(rho);
    const int b = 2 * m.max_abs_index();  // support of F[rho]
    double quad = 0.0;
    for (int k1 = -b; k1 <= b; ++k1) {
        double row = 0.0;
        for (int k2 = -b; k2 <= b; ++k2) {
            const Mode k{k1, k2};
            row += p.w_hat_eps(k) * std::norm(coeff_at(rho_hat, n_grid, k));
        }
        quad += row;
    }
    const double rho0 = coeff_at(rho_hat, n_grid, {0, 0}).real();
    return 0.5 * quad - rc.tau * rho0 - rc.e_const;
}

double interaction_v_local(const FieldSample& f, double c_K, int n_grid) {
    require_grid(*f.mode_set, n_grid, 4, "interaction_v_local");
    const GridField g = to_grid(f, n_grid);
    double acc = 0.0, comp = 0.0;  // Kahan
    for (const Complex& v : g.values) {
        const double a2 = std::norm(v);
        const double term = a2 * a2 - 4.0 * c_K * a2 + 2.0 * c_K * c_K;
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return 0.5 * acc / (static_cast<double>(g.n) * g.n);
}

double weighted_green_coeff(const ModeSet& m, const PotentialSpec& p, const Mode& mode) {
    double s = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const Mode& q = m.modes[i];
        s += p.w_hat_eps({mode[0] - q[0], mode[1] - q[1]}) / m.eigenvalues[i];
    }
    return s;
}

double interaction_v_smeared(const FieldSample& f, const PotentialSpec& p,
                             const RenormConstants& rc, int n_grid) {
    // :|u(x)|^2|u(y)|^2: = rho(x)rho(y) - 2 G(x-y) Re[conj(u(x))u(y)] + G(x-y)^2
    const ModeSet& m = *f.mode_set;
    require_grid(m, n_grid, 4, "interaction_v_smeared");
    const GridField rho = wick_density(f, rc.c_K, n_grid);
    const std::vector<Complex> rho_hat = grid_coefficients(rho);
    const int b = 2 * m.max_abs_index();
    double quad = 0.0;
    for (int k1 = -b; k1 <= b; ++k1)
        for (int k2 = -b; k2 <= b; ++k2) {
            const Mode k{k1, k2};
            quad += p.w_hat_eps(k) * std::norm(coeff_at(rho_hat, n_grid, k));
        }
    double cross = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        cross += weighted_green_coeff(m, p, m.modes[i]) * std::norm(f.alpha[i]);
    }
    return 0.5 * quad - cross + rc.e_const;
}

double cross_term_i(const FieldSample& f, const PotentialSpec& p, const RenormConstants& rc,
                    int n_grid) {
    require_grid(*f.mode_set, n_grid, 4, "cross_term_i");
    const ModeSet& m = *f.mode_set;
    double cross = 0.0, norm2 = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        cross += weighted_green_coeff(m, p, m.modes[i]) * std::norm(f.alpha[i]);
        norm2 += std::norm(f.alpha[i]);
    }
    return -cross + rc.tau * (norm2 - rc.c_K) + 2.0 * rc.e_const;
}

namespace reference {

std::vector<std::pair<Mode, Complex>> rho_coeffs_direct(const FieldSample& f, double c_K) {
    const ModeSet& m = *f.mode_set;
    std::vector<std::pair<Mode, Complex>> out;
    out.reserve(m.differences().size());
    for (const Mode& k : m.differences()) {
        Complex s = 0.0;
        for (int i = 0; i < m.size(); ++i) {
            const Mode& pm = m.modes[i];
            const int j = m.index_of({pm[0] + k[0], pm[1] + k[1]});
            if (j >= 0) s += std::conj(f.alpha[i]) * f.alpha[j];
        }
        if (k[0] == 0 && k[1] == 0) s -= c_K;
        out.emplace_back(k, s);
    }
    return out;
}

double interaction_w_direct(const FieldSample& f, const PotentialSpec& p,
                            const RenormConstants& rc) {
    double quad = 0.0;
    double rho0 = 0.0;
    for (const auto& [k, c] : rho_coeffs_direct(f, rc.c_K)) {
        quad += p.w_hat_eps(k) * std::norm(c);
        if (k[0] == 0 && k[1] == 0) rho0 = c.real();
    }
    return 0.5 * quad - rc.tau * rho0 - rc.e_const;
}

double interaction_v_local_direct(const FieldSample& f, double c_K) {
    // avg |u|^4 = sum_{p+q=r+s} a_p a_q conj(a_r a_s), O(K^3) with lookup
    const ModeSet& m = *f.mode_set;
    const int K = m.size();
    double quartic = 0.0;
    for (int ip = 0; ip < K; ++ip)
        for (int iq = 0; iq < K; ++iq)
            for (int ir = 0; ir < K; ++ir) {
                const Mode s{m.modes[ip][0] + m.modes[iq][0] - m.modes[ir][0],
                             m.modes[ip][1] + m.modes[iq][1] - m.modes[ir][1]};
                const int is = m.index_of(s);
                if (is < 0) continue;
                quartic += (f.alpha[ip] * f.alpha[iq] *
                            std::conj(f.alpha[ir] * f.alpha[is]))
                               .real();
            }
    double norm2 = 0.0;
    for (const Complex& a : f.alpha) norm2 += std::norm(a);
    return 0.5 * (quartic - 4.0 * c_K * norm2 + 2.0 * c_K * c_K);
}

double interaction_v_smeared_direct(const FieldSample& f, const PotentialSpec& p,
                                    const RenormConstants& rc) {
    const ModeSet& m = *f.mode_set;
    double quad = 0.0;
    for (const auto& [k, c] : rho_coeffs_direct(f, rc.c_K)) {
        quad += p.w_hat_eps(k) * std::norm(c);
    }
    double cross = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        cross += weighted_green_coeff(m, p, m.modes[i]) * std::norm(f.alpha[i]);
    }
    return 0.5 * quad - cross + rc.e_const;
}

double cross_term_i_direct(const FieldSample& f, const PotentialSpec& p,
                           const RenormConstants& rc) {
    const ModeSet& m = *f.mode_set;
    double cross = 0.0, norm2 = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        cross += weighted_green_coeff(m, p, m.modes[i]) * std::norm(f.alpha[i]);
        norm2 += std::norm(f.alpha[i]);
    }
    return -cross + rc.tau * (norm2 - rc.c_K) + 2.0 * rc.e_const;
}

}  // namespace reference

double i_norm_exact(const ModeSet& m, const PotentialSpec& p, const RenormConstants& rc) {
    double var = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const double d = rc.tau - weighted_green_coeff(m, p, m.modes[i]);
        var += d * d / (m.eigenvalues[i] * m.eigenvalues[i]);
    }
    return std::sqrt(var);
}

double w_lower_bound(const PotentialSpec& p, const RenormConstants& rc) {
    return -0.5 * rc.tau * rc.tau / p.w_hat_sq(0.0) - rc.e_const;
}

}  // namespace phi4
