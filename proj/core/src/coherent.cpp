#include "phi4/coherent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phi4 {

namespace {

// composite Gauss-Legendre on [0, t_max], panels of width ~2
template <typename F>
double integrate_radial(const F& f, double t_max) {
    static const double xs[8] = {-0.9602898564975363, -0.7966664774136267,
                                 -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double ws[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    const int panels = std::max(32, static_cast<int>(t_max / 2.0));
    const double h = t_max / panels;
    double acc = 0.0;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = pnl * h;
        double local = 0.0;
        for (int i = 0; i < 8; ++i) local += ws[i] * f(a + 0.5 * h * (xs[i] + 1.0));
        acc += 0.5 * h * local;
    }
    return acc;
}

}  // namespace

double poisson_tail(double mu, int n) {
    if (mu <= 0.0) return 0.0;
    // P(N <= n) via stable log-space terms, then 1 - CDF by direct tail sum
    // from below when the CDF is close to 1.
    double cdf = 0.0;
    double log_term = -mu;  // log P(N = 0)
    for (int j = 0; j <= n; ++j) {
        cdf += std::exp(log_term);
        log_term += std::log(mu) - std::log1p(static_cast<double>(j));
    }
    if (cdf < 1.0 - 1e-9) return 1.0 - cdf;
    // sum the tail directly
    double tail = 0.0;
    double lt = log_term;  // log P(N = n+1)
    for (int j = n + 1; j < n + 2000; ++j) {
        const double term = std::exp(lt);
        tail += term;
        if (term < 1e-300 || term < tail * 1e-18) break;
        lt += std::log(mu) - std::log1p(static_cast<double>(j));
    }
    return tail;
}

CoherentVector coherent_vector(const Eigen::VectorXcd& u, double lambda, const FockBasis& basis,
                               double defect_tol) {
    const int K = basis.n_modes();
    if (u.size() != K) throw std::invalid_argument("coherent_vector: dimension mismatch");
    if (!(lambda > 0.0)) throw std::domain_error("coherent_vector: lambda must be > 0");
    const Eigen::VectorXcd v = u / std::sqrt(lambda);
    const double mu = v.squaredNorm();
    CoherentVector out;
    out.scale = lambda;
    out.defect = poisson_tail(mu, basis.n_max());
    if (out.defect > defect_tol) {
        std::ostringstream msg;
        msg << "coherent_vector: truncation defect " << out.defect << " exceeds " << defect_tol
            << "; increase n_max (|u|^2/lambda = " << mu << ", n_max = " << basis.n_max() << ")";
        throw ConfigError(msg.str());
    }
    // powers[j][n] = v_j^n / sqrt(n!)
    std::vector<std::vector<Complex>> powers(static_cast<std::size_t>(K));
    for (int j = 0; j < K; ++j) {
        auto& pj = powers[static_cast<std::size_t>(j)];
        pj.resize(static_cast<std::size_t>(basis.n_max()) + 1);
        pj[0] = 1.0;
        for (int n = 1; n <= basis.n_max(); ++n) pj[n] = pj[n - 1] * v(j) / std::sqrt(double(n));
    }
    const double norm_factor = std::exp(-0.5 * mu);
    out.amplitudes.resize(basis.dim());
    for (int s = 0; s < basis.dim(); ++s) {
        Complex c = norm_factor;
        const auto& occ = basis.state(s);
        for (int j = 0; j < K; ++j) c *= powers[static_cast<std::size_t>(j)][occ[j]];
        out.amplitudes(s) = c;
    }
    return out;
}

double lower_symbol_density(const Op& gamma_p, const Eigen::VectorXcd& u, double lambda,
                            const FockBasis& basis, double defect_tol) {
    const CoherentVector xi = coherent_vector(u, lambda, basis, defect_tol);
    const double overlap = (xi.amplitudes.adjoint() * gamma_p * xi.amplitudes)(0).real();
    const double norm = std::pow(lambda * kPi, -basis.n_modes());
    return norm * overlap;
}

double free_gibbs_husimi_oracle(const Eigen::VectorXcd& u, double lambda, const ModeSet& m) {
    if (u.size() != m.size()) throw std::invalid_argument("husimi_oracle: dimension mismatch");
    double quad = 0.0;
    double log_z = m.size() * std::log(lambda * kPi);
    for (int j = 0; j < m.size(); ++j) {
        const double one_minus = -std::expm1(-lambda * m.eigenvalues[j]);
        quad += (one_minus / lambda) * std::norm(u(j));
        log_z -= std::log(one_minus);
    }
    return std::exp(-quad - log_z);
}

Eigen::VectorXcd sample_free_husimi(const ModeSet& m, double lambda, RngStream& rng) {
    Eigen::VectorXcd u(m.size());
    for (int j = 0; j < m.size(); ++j) {
        const double var = lambda / -std::expm1(-lambda * m.eigenvalues[j]);  // E|u_j|^2
        u(j) = rng.next_complex_normal() * std::sqrt(var / 2.0);
    }
    return u;
}

Eigen::MatrixXcd definetti_rhs_exact(const Op& gamma_p, const FockBasis& basis, double lambda,
                                     int k) {
    const int K = basis.n_modes();
    const Eigen::MatrixXcd g1 = reduced_density_1(basis, gamma_p);
    if (k == 1) {
        return lambda * (g1 + Eigen::MatrixXcd::Identity(K, K));
    }
    if (k == 2) {
        const Eigen::MatrixXcd g2 = reduced_density_2(basis, gamma_p);
        Eigen::MatrixXcd out = 2.0 * lambda * lambda * g2;
        for (int p = 0; p < K; ++p)
            for (int q = 0; q < K; ++q)
                for (int i = 0; i < K; ++i)
                    for (int j = 0; j < K; ++j) {
                        Complex t = 0.0;
                        if (p == j) t += g1(q, i);
                        if (q == j) t += g1(p, i);
                        if (p == i) t += g1(q, j);
                        if (q == i) t += g1(p, j);
                        if (p == i && q == j) t += 1.0;
                        if (q == i && p == j) t += 1.0;
                        out(p * K + q, i * K + j) += lambda * lambda * t;
                    }
        return out;
    }
    throw std::invalid_argument("definetti_rhs_exact: k must be 1 or 2");
}

namespace {

double trace_norm_hermitian(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

DeFinettiResult definetti_check(const Op& gamma_p, const FockBasis& basis, const ModeSet& m,
                                double lambda, int k, std::int64_t n_samples,
                                std::uint64_t seed) {
    const int K = basis.n_modes();
    if (K > 3) throw ConfigError("definetti_check: only K <= 3 is supported");
    if (k != 1 && k != 2) throw std::invalid_argument("definetti_check: k must be 1 or 2");
    if (m.size() != K) throw std::invalid_argument("definetti_check: mode-set mismatch");

    const int dim = (k == 1) ? K : K * K;
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXd var_acc = Eigen::MatrixXd::Zero(dim, dim);  // per-entry |.|^2 sums
    double defect_budget = 0.0;  // weighted mean truncation defect

    for (std::int64_t s = 0; s < n_samples; ++s) {
        RngStream rng(seed, static_cast<std::uint64_t>(s));
        const Eigen::VectorXcd u = sample_free_husimi(m, lambda, rng);
        const double proposal = free_gibbs_husimi_oracle(u, lambda, m);
        const CoherentVector xi = coherent_vector(u, lambda, basis, 2.0);  // defect budgeted, not fatal
        const double target =
            std::pow(lambda * kPi, -K) * (xi.amplitudes.adjoint() * gamma_p * xi.amplitudes)(0).real();
        const double w = target / proposal;
        defect_budget += std::abs(w) * xi.defect * u.squaredNorm();
        Eigen::VectorXcd ten(dim);
        if (k == 1) {
            ten = u;
        } else {
            for (int p = 0; p < K; ++p)
                for (int q = 0; q < K; ++q) ten(p * K + q) = u(p) * u(q);
        }
        const Eigen::MatrixXcd outer = w * (ten * ten.adjoint());
        mean += outer;
        var_acc += outer.cwiseAbs2().real();
    }
    const double n = static_cast<double>(n_samples);
    mean /= n;
    DeFinettiResult out;
    out.n_samples = n_samples;
    out.defect = defect_budget / n;

    const Eigen::MatrixXcd exact = definetti_rhs_exact(gamma_p, basis, lambda, k);
    out.residual = trace_norm_hermitian(mean - exact);
    // Frobenius-type error propagated to the trace norm: |.|_S1 <= sqrt(r)|.|_F
    double fro_var = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double second = var_acc(i, j) / n;
            const double sq = std::norm(mean(i, j));
            fro_var += std::max(0.0, second - sq) / n;
        }
    out.mc_sigma = std::sqrt(fro_var * dim);

    // the explicit trace-norm estimate: LHS is the sum of the l < k terms,
    // all positive semidefinite, so the S1 norm is a plain trace
    const Eigen::MatrixXcd g1 = reduced_density_1(basis, gamma_p);
    if (k == 1) {
        out.bound_lhs = lambda * K;  // ||lambda P||_S1
    } else {
        const double tr_g1 = g1.trace().real();
        out.bound_lhs = lambda * lambda * (K * (K + 1.0)) + 2.0 * lambda * lambda * (K + 1.0) * tr_g1;
    }
    const Op num = number_operator(basis);
    double rhs = 0.0;
    for (int l = 0; l <= k; ++l) {
        const double binom = (k == 1) ? 1.0 : (l == 1 ? 2.0 : 1.0);
        double rising = 1.0;  // (k - l + K - 1)! / (K-1)!
        for (int t = K; t <= k - l + K - 1; ++t) rising *= t;
        Op npow = Op::Identity(basis.dim(), basis.dim());
        for (int t = 0; t < l; ++t) npow = npow * num;
        const double tr_nl = (npow * gamma_p).trace().real();
        rhs += binom * binom * rising * tr_nl;
    }
    out.bound_rhs = std::pow(lambda, k) * rhs;
    return out;
}

double convex_f(ConvexTest f, double x, double c) {
    switch (f) {
        case ConvexTest::XLogX:
            return x <= 0.0 ? 0.0 : x * std::log(x);
        case ConvexTest::Square:
            return x * x;
        case ConvexTest::AbsDev:
            // the f(0) = 0 affine representative of |x - c|: both sides of a
            // Berezin-Lieb inequality shift by the same affine functional, but
            // only the f(0) = 0 member stays finite under truncation
            return std::max(0.0, x - c);
    }
    return 0.0;
}

namespace {

// <xi(sqrt(t) e^{i theta} / sqrt(lambda)) | Gamma | xi(...)> at K = 1 without
// re-building coherent vectors: overlap = e^{-s} sum_{m,n} G_{mn}
// conj(z)^m z^n / sqrt(m! n!), z = sqrt(t) e^{i theta}, s = t.
double husimi_overlap_k1(const Op& gamma, double t, double theta, int n_max) {
    std::vector<Complex> pow_z(static_cast<std::size_t>(n_max) + 1);
    const Complex z = std::sqrt(t) * Complex(std::cos(theta), std::sin(theta));
    pow_z[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) pow_z[n] = pow_z[n - 1] * z / std::sqrt(double(n));
    Complex acc = 0.0;
    for (int mm = 0; mm <= n_max; ++mm)
        for (int n = 0; n <= n_max; ++n) acc += gamma(mm, n) * std::conj(pow_z[mm]) * pow_z[n];
    return std::exp(-t) * acc.real();
}

bool is_diagonal(const Op& a) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j && std::abs(a(i, j)) > 1e-14) return false;
    return true;
}

}  // namespace

double berezin_lieb_first(const Op& gamma, double lambda, const FockBasis& basis, ConvexTest f,
                          double abs_dev_center) {
    if (basis.n_modes() != 1) throw ConfigError("berezin_lieb_first: deterministic path needs K = 1");
    (void)lambda;  // cancels against the partition-of-unity normalization
    Eigen::SelfAdjointEigenSolver<Op> es(gamma, Eigen::EigenvaluesOnly);
    double lhs = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        lhs += convex_f(f, std::max(0.0, es.eigenvalues()(i)), abs_dev_center);

    const int n_max = basis.n_max();
    const double t_max = 3.0 * n_max + 120.0;
    const bool diag = is_diagonal(gamma);
    const int n_theta = diag ? 1 : 4 * n_max + 8;
    double rhs = 0.0;
    for (int it = 0; it < n_theta; ++it) {
        const double theta = 2.0 * kPi * it / n_theta;
        rhs += integrate_radial(
                   [&](double t) {
                       return convex_f(f, husimi_overlap_k1(gamma, t, theta, n_max),
                                       abs_dev_center);
                   },
                   t_max) /
               n_theta;
    }
    return lhs - rhs;
}

Op upper_symbol_state_radial(const RadialDensity& r, double lambda, const FockBasis& basis,
                             double t_max) {
    if (basis.n_modes() != 1) throw ConfigError("upper_symbol_state_radial: needs K = 1");
    (void)lambda;  // the scale cancels after the polar change of variables
    const int n_max = basis.n_max();
    Op out = Op::Zero(basis.dim(), basis.dim());
    for (int n = 0; n <= n_max; ++n) {
        const double lg = std::lgamma(n + 1.0);
        out(n, n) = integrate_radial(
            [&](double t) { return r(t) * std::exp(n * std::log(t) - t - lg); }, t_max);
    }
    return out;
}

double berezin_lieb_second(const RadialDensity& r, double lambda, const FockBasis& basis,
                           ConvexTest f, double t_max, double abs_dev_center) {
    const Op gamma_nu = upper_symbol_state_radial(r, lambda, basis, t_max);
    Eigen::SelfAdjointEigenSolver<Op> es(gamma_nu, Eigen::EigenvaluesOnly);
    double tr_f = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        tr_f += convex_f(f, std::max(0.0, es.eigenvalues()(i)), abs_dev_center);
    const double rhs =
        integrate_radial([&](double t) { return convex_f(f, r(t), abs_dev_center); }, t_max);
    return rhs - tr_f;
}

Op upper_symbol_state_mc(const std::vector<Eigen::VectorXcd>& points, double lambda,
                         const FockBasis& basis, double defect_tol) {
    Op out = Op::Zero(basis.dim(), basis.dim());
    for (const auto& u : points) {
        const CoherentVector xi = coherent_vector(u, lambda, basis, defect_tol);
        out += xi.amplitudes * xi.amplitudes.adjoint();
    }
    out /= static_cast<double>(points.size());
    return out;
}

Op identity_ball_operator(double lambda, const FockBasis& basis, double radius) {
    if (basis.n_modes() != 1) throw ConfigError("identity_ball_operator: needs K = 1");
    const double t_max = radius * radius / lambda;
    Op out = Op::Zero(basis.dim(), basis.dim());
    for (int n = 0; n <= basis.n_max(); ++n) {
        const double lg = std::lgamma(n + 1.0);
        out(n, n) = integrate_radial(
            [&](double t) { return std::exp(n * std::log(t) - t - lg); }, t_max);
    }
    return out;
}

HclEstimate classical_relative_entropy_mc(const Op& gamma, const Op& gamma_prime,
                                          const FockBasis& basis, const ModeSet& m, double lambda,
                                          std::int64_t n_samples, std::uint64_t seed) {
    // E_{mu'}[r log r] with r = dens(Gamma)/dens(Gamma'), importance-sampled
    // from the free oracle g: E_{mu'}[r log r] = E_g[(mu'/g) r log r].
    double acc = 0.0, acc2 = 0.0;
    for (std::int64_t s = 0; s < n_samples; ++s) {
        RngStream rng(seed, static_cast<std::uint64_t>(s));
        const Eigen::VectorXcd u = sample_free_husimi(m, lambda, rng);
        const double g = free_gibbs_husimi_oracle(u, lambda, m);
        const CoherentVector xi = coherent_vector(u, lambda, basis, 2.0);
        const double norm = std::pow(lambda * kPi, -basis.n_modes());
        const double da = norm * (xi.amplitudes.adjoint() * gamma * xi.amplitudes)(0).real();
        const double db = norm * (xi.amplitudes.adjoint() * gamma_prime * xi.amplitudes)(0).real();
        double term = 0.0;
        if (da > 1e-300 && db > 1e-300) {
            const double r = da / db;
            term = (db / g) * r * std::log(r);
        }
        acc += term;
        acc2 += term * term;
    }
    const double n = static_cast<double>(n_samples);
    HclEstimate out;
    out.value = acc / n;
    out.std_error = std::sqrt(std::max(0.0, acc2 / n - out.value * out.value) / n);
    return out;
}

}  // namespace phi4
