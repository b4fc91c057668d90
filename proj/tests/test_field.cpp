#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "phi4/field.hpp"
#include "phi4/free_energy.hpp"

using namespace phi4;
using Catch::Approx;

namespace {

PotentialSpec gaussian_potential(double eps, double width = 1.0) {
    PotentialSpec p;
    p.family = PotentialSpec::Family::Gaussian;
    p.width = width;
    p.epsilon = eps;
    return p;
}

FieldSample constant_sample(const ModeSet& m, Complex alpha0) {
    FieldSample f;
    f.mode_set = &m;
    f.alpha.assign(m.modes.size(), Complex(0.0, 0.0));
    f.alpha[static_cast<std::size_t>(m.index_of({0, 0}))] = alpha0;
    return f;
}

}  // namespace

TEST_CASE("free field sampler statistics") {
    SECTION("single-mode variance within 3 sigma over 1e5 samples") {
        const ModeSet m = build_mode_set(1.0);
        const std::int64_t n = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(7, static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            const double a2 = std::norm(f.alpha[0]);
            sum += a2;
            sum_sq += a2 * a2;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        REQUIRE(std::abs(mean - 1.0) < 3.0 * se);  // E|alpha_0|^2 = 1/lambda_0 = 1
    }
    SECTION("coefficients are centered") {
        const ModeSet m = build_mode_set(5.0);
        const std::int64_t n = 50000;
        std::vector<Complex> mean(m.modes.size(), 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(11, static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += f.alpha[j];
        }
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double sd = std::sqrt(1.0 / m.eigenvalues[j]);  // per complex coefficient
            const double se = sd / std::sqrt(double(n));
            REQUIRE(std::abs(mean[j] / double(n)) < 4.0 * se);
        }
    }
    SECTION("quadratic-form energy: E[sum lambda_k |alpha_k|^2] = K") {
        // times the torus volume this is the spec's K (2pi)^2 Lebesgue value
        const ModeSet m = build_mode_set(2.0);
        const std::int64_t n = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(13, static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            double e = 0.0;
            for (int j = 0; j < m.size(); ++j) e += m.eigenvalues[j] * std::norm(f.alpha[j]);
            sum += e;
            sum_sq += e * e;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        REQUIRE(std::abs(mean - m.size()) < 3.0 * se);
        REQUIRE(to_volume_units(m.size(), 1) == Approx(m.size() * kTorusVolume));
    }
}

TEST_CASE("grid transform") {
    const ModeSet m = build_mode_set(10.0);
    RngStream rng(3, 0);
    const FieldSample f = sample_free_field(m, rng);
    SECTION("round trip coefficients -> grid -> coefficients is exact") {
        const int n = auto_grid(m);
        const GridField g = to_grid(f, n);
        const auto coeffs = grid_coefficients(g);
        for (int i = 0; i < m.size(); ++i) {
            const Complex back = coeff_at(coeffs, n, m.modes[i]);
            REQUIRE(std::abs(back - f.alpha[i]) < 1e-12);
        }
        // no leakage outside the mode set
        const Complex stray = coeff_at(coeffs, n, {m.max_abs_index() + 1, 0});
        REQUIRE(std::abs(stray) < 1e-12);
    }
    SECTION("aliasing grid is a configuration error") {
        REQUIRE_THROWS_AS(to_grid(f, 4), ConfigError);
        REQUIRE_THROWS_AS(interaction_v_local(f, 1.0, 8), ConfigError);
        REQUIRE_THROWS_AS(interaction_w(f, gaussian_potential(0.2), RenormConstants{}, 8),
                          ConfigError);
    }
}

TEST_CASE("wick density") {
    SECTION("zero field gives -c_K") {
        const ModeSet m = build_mode_set(2.0);
        FieldSample f;
        f.mode_set = &m;
        f.alpha.assign(m.modes.size(), 0.0);
        const GridField rho = wick_density(f, 1.7, 16);
        for (const Complex& v : rho.values) REQUIRE(v.real() == Approx(-1.7));
    }
    SECTION("single mode with alpha_0 = 1 has identically zero density") {
        const ModeSet m = build_mode_set(1.0);
        const FieldSample f = constant_sample(m, 1.0);
        const GridField rho = wick_density(f, 1.0, 8);  // c_K = 1 at cutoff 1
        for (const Complex& v : rho.values) REQUIRE(std::abs(v) < 1e-14);
    }
    SECTION("grid mean of rho equals the coefficient-space integral") {
        const ModeSet m = build_mode_set(12.0);
        RngStream rng(5, 1);
        const FieldSample f = sample_free_field(m, rng);
        const double c_K = 2.3;
        const GridField rho = wick_density(f, c_K, auto_grid(m));
        double mean = 0.0;
        for (const Complex& v : rho.values) mean += v.real();
        mean /= static_cast<double>(rho.values.size());
        double norm2 = 0.0;
        for (const Complex& a : f.alpha) norm2 += std::norm(a);
        REQUIRE(mean == Approx(norm2 - c_K).epsilon(1e-10));
    }
}

TEST_CASE("interaction functionals, closed forms") {
    const ModeSet m1 = build_mode_set(1.0);
    const PotentialSpec p = gaussian_potential(0.3);
    const RenormConstants rc = renorm_constants(m1, p, 1.0);

    SECTION("W at u = 0 matches the single-mode closed form") {
        FieldSample f;
        f.mode_set = &m1;
        f.alpha.assign(1, 0.0);
        const double w = interaction_w(f, p, rc, 8);
        // rho_hat(0) = -1: W = 1/2 + tau - E
        REQUIRE(w == Approx(0.5 * p.w_hat_sq(0) + rc.tau - rc.e_const).epsilon(1e-12));
        // in Lebesgue units this is the (2pi)-powered value
        REQUIRE(to_volume_units(w, 2) ==
                Approx(0.5 * kTorusVolume * kTorusVolume + to_volume_units(rc.tau, 1) * kTorusVolume -
                       to_volume_units(rc.e_const, 2)));
    }
    SECTION("W at the unit constant field is -E") {
        const FieldSample f = constant_sample(m1, 1.0);
        REQUIRE(interaction_w(f, p, rc, 8) == Approx(-rc.e_const).margin(1e-12));
    }
    SECTION("V at u = 0 is c_K^2 (volume-normalized)") {
        FieldSample f;
        f.mode_set = &m1;
        f.alpha.assign(1, 0.0);
        REQUIRE(interaction_v_local(f, rc.c_K, 8) == Approx(rc.c_K * rc.c_K));
        REQUIRE(to_volume_units(interaction_v_local(f, rc.c_K, 8), 1) ==
                Approx(rc.c_K * rc.c_K * kTorusVolume));
    }
    SECTION("V at the unit constant field is -1/2 (volume-normalized)") {
        const FieldSample f = constant_sample(m1, 1.0);
        const double v = interaction_v_local(f, rc.c_K, 8);
        REQUIRE(v == Approx(-0.5));
        REQUIRE(to_volume_units(v, 1) == Approx(-0.5 * kTorusVolume));
    }
    SECTION("I at u = 0 equals V_smeared - W, both sides independent") {
        FieldSample f;
        f.mode_set = &m1;
        f.alpha.assign(1, 0.0);
        const double lhs = cross_term_i(f, p, rc, 8);
        const double rhs = interaction_v_smeared(f, p, rc, 8) - interaction_w(f, p, rc, 8);
        REQUIRE(lhs == Approx(rhs).margin(1e-10));
    }
}

TEST_CASE("interaction functionals on random samples") {
    const ModeSet m = build_mode_set(10.0);
    const PotentialSpec p = gaussian_potential(0.2);
    const RenormConstants rc = renorm_constants(m, p, 0.7);
    const int n_grid = auto_grid(m);

    SECTION("per-sample identity V_smeared = W + I to 1e-8 relative") {
        for (std::uint64_t i = 0; i < 25; ++i) {
            RngStream rng(21, i);
            const FieldSample f = sample_free_field(m, rng);
            const double w = interaction_w(f, p, rc, n_grid);
            const double v = interaction_v_smeared(f, p, rc, n_grid);
            const double cross = cross_term_i(f, p, rc, n_grid);
            const double scale = std::max({1.0, std::abs(v), std::abs(w)});
            REQUIRE(std::abs(v - (w + cross)) < 1e-8 * scale);
        }
    }
    SECTION("Young lower bound holds for every sample") {
        const double bound = w_lower_bound(p, rc);
        for (std::uint64_t i = 0; i < 200; ++i) {
            RngStream rng(22, i);
            const FieldSample f = sample_free_field(m, rng);
            REQUIRE(interaction_w(f, p, rc, n_grid) >= bound - 1e-10);
        }
    }
    SECTION("quadratic part of W is nonnegative for every sample") {
        for (std::uint64_t i = 0; i < 50; ++i) {
            RngStream rng(23, i);
            const FieldSample f = sample_free_field(m, rng);
            const double w = interaction_w(f, p, rc, n_grid);
            double norm2 = 0.0;
            for (const Complex& a : f.alpha) norm2 += std::norm(a);
            const double linear = -rc.tau * (norm2 - rc.c_K) - rc.e_const;
            REQUIRE(w - linear >= -1e-12);
        }
    }
    SECTION("FFT pipeline agrees with direct mode sums to 1e-8") {
        for (std::uint64_t i = 0; i < 10; ++i) {
            RngStream rng(24, i);
            const FieldSample f = sample_free_field(m, rng);
            const double tol = 1e-8;
            const double w_fft = interaction_w(f, p, rc, n_grid);
            const double w_dir = reference::interaction_w_direct(f, p, rc);
            REQUIRE(std::abs(w_fft - w_dir) < tol * std::max(1.0, std::abs(w_dir)));
            const double v_fft = interaction_v_local(f, rc.c_K, n_grid);
            const double v_dir = reference::interaction_v_local_direct(f, rc.c_K);
            REQUIRE(std::abs(v_fft - v_dir) < tol * std::max(1.0, std::abs(v_dir)));
            const double s_fft = interaction_v_smeared(f, p, rc, n_grid);
            const double s_dir = reference::interaction_v_smeared_direct(f, p, rc);
            REQUIRE(std::abs(s_fft - s_dir) < tol * std::max(1.0, std::abs(s_dir)));
            const double i_fft = cross_term_i(f, p, rc, n_grid);
            const double i_dir = reference::cross_term_i_direct(f, p, rc);
            REQUIRE(std::abs(i_fft - i_dir) < tol * std::max(1.0, std::abs(i_dir)));
        }
    }
}

TEST_CASE("Monte Carlo calibration of the Wick functionals") {
    SECTION("W has mean zero by counterterm construction") {
        const ModeSet m = build_mode_set(10.0);
        const PotentialSpec p = gaussian_potential(0.2);
        const RenormConstants rc = renorm_constants(m, p, 0.7);
        const int n_grid = auto_grid(m);
        const std::int64_t n = 20000;
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(31, static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            const double w = interaction_w(f, p, rc, n_grid);
            sum += w;
            sum_sq += w * w;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        REQUIRE(std::abs(mean) < 3.0 * se);
    }
    SECTION("V_K has mean zero under the free measure") {
        const ModeSet m = build_mode_set(10.0);
        const int n_grid = auto_grid(m);
        double c_K = 0.0;
        for (double lam_k : m.eigenvalues) c_K += 1.0 / lam_k;
        const std::int64_t n = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(32, static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            const double v = interaction_v_local(f, c_K, n_grid);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        REQUIRE(std::abs(mean) < 3.0 * se);
    }
    SECTION("Wick-square covariance: E[rho(x) rho(y)] = G_K(x-y)^2") {
        const ModeSet m = build_mode_set(6.0);
        const RenormConstants rc = renorm_constants(m, gaussian_potential(0.5), 1.0);
        const int n_grid = 16;
        const std::int64_t n = 60000;
        // two fixed grid points
        const int ia = 1, ja = 2, ib = 9, jb = 5;
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(33, static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            const GridField rho = wick_density(f, rc.c_K, n_grid);
            const double prod = rho.at(ia, ja).real() * rho.at(ib, jb).real();
            sum += prod;
            sum_sq += prod * prod;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        const double h = 2.0 * kPi / n_grid;
        const double g = green_truncated({(ia - ib) * h, (ja - jb) * h}, m);
        REQUIRE(std::abs(mean - g * g) < 3.0 * se);
    }
    SECTION("||I||_{L^2} Monte Carlo matches the exact diagonal formula") {
        const ModeSet m = build_mode_set(8.0);
        const PotentialSpec p = gaussian_potential(0.3);
        const RenormConstants rc = renorm_constants(m, p, 1.0);
        const int n_grid = auto_grid(m);
        const std::int64_t n = 40000;
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream rng(34, static_cast<std::uint64_t>(i));
            const FieldSample f = sample_free_field(m, rng);
            const double cross = cross_term_i(f, p, rc, n_grid);
            sum += cross * cross;
            sum_sq += cross * cross * cross * cross;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        const double exact = i_norm_exact(m, p, rc);
        REQUIRE(std::abs(mean - exact * exact) < 3.0 * se);
    }
    SECTION("||V_smeared - W|| saturates in the cutoff at fixed eps") {
        const PotentialSpec p = gaussian_potential(0.25);
        std::vector<double> norms;
        for (double cut : {200.0, 400.0, 800.0}) {
            const ModeSet m = build_mode_set(cut);
            const RenormConstants rc = renorm_constants(m, p, 1.0);
            norms.push_back(i_norm_exact(m, p, rc));
        }
        // uniform-in-K bound: doubling the cutoff moves the norm less and
        // less once the potential's Fourier support is resolved
        const double r1 = norms[1] / norms[0];
        const double r2 = norms[2] / norms[1];
        REQUIRE(r2 < r1);
        REQUIRE(r2 < 1.05);
    }
    SECTION("||I|| decreases as eps decreases (exact formula)") {
        const ModeSet m = build_mode_set(30.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double eps : {0.4, 0.2, 0.1, 0.05}) {
            const RenormConstants rc = renorm_constants(m, gaussian_potential(eps), 1.0);
            const double nrm = i_norm_exact(m, gaussian_potential(eps), rc);
            REQUIRE(nrm < prev);
            prev = nrm;
        }
    }
}
