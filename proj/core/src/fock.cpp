#include "phi4/fock.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phi4 {

namespace {

std::uint64_t pack_occ(const std::vector<std::uint8_t>& occ) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < occ.size(); ++j) key |= std::uint64_t(occ[j]) << (8 * j);
    return key;
}

void enumerate(int mode, int remaining, std::vector<std::uint8_t>& occ,
               std::vector<std::vector<std::uint8_t>>& out) {
    if (mode == static_cast<int>(occ.size())) {
        out.push_back(occ);
        return;
    }
    for (int n = 0; n <= remaining; ++n) {
        occ[mode] = static_cast<std::uint8_t>(n);
        enumerate(mode + 1, remaining - n, occ, out);
    }
    occ[mode] = 0;
}

}  // namespace

FockBasis FockBasis::build(int n_modes, int n_max) {
    if (n_modes < 1 || n_modes > kMaxModes) {
        throw ConfigError("FockBasis: n_modes must be in [1, 8]");
    }
    if (n_max < 0 || n_max > 254) {
        throw ConfigError("FockBasis: n_max must be in [0, 254]");
    }
    FockBasis b;
    b.n_modes_ = n_modes;
    b.n_max_ = n_max;
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(n_modes), 0);
    enumerate(0, n_max, occ, b.states_);
    std::sort(b.states_.begin(), b.states_.end(),
              [](const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& c) {
                  const int ta = std::accumulate(a.begin(), a.end(), 0);
                  const int tc = std::accumulate(c.begin(), c.end(), 0);
                  if (ta != tc) return ta < tc;
                  return a < c;
              });
    b.totals_.reserve(b.states_.size());
    b.keys_.reserve(b.states_.size());
    for (const auto& s : b.states_) {
        b.totals_.push_back(std::accumulate(s.begin(), s.end(), 0));
        b.keys_.push_back(pack_occ(s));
    }
    return b;
}

int FockBasis::find_key(std::uint64_t key) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
        if (keys_[i] == key) return static_cast<int>(i);
    }
    return -1;
}

int FockBasis::index_of(const std::vector<std::uint8_t>& occ) const {
    if (occ.size() != static_cast<std::size_t>(n_modes_)) return -1;
    return find_key(pack_occ(occ));
}

std::pair<Op, Op> build_ladder(const FockBasis& basis, int j) {
    if (j < 0 || j >= basis.n_modes()) throw std::out_of_range("build_ladder: mode index");
    const int d = basis.dim();
    Op adag = Op::Zero(d, d);
    std::vector<std::uint8_t> occ;
    for (int s = 0; s < d; ++s) {
        if (basis.total(s) == basis.n_max()) continue;  // truncation boundary
        occ = basis.state(s);
        occ[j] += 1;
        const int t = basis.index_of(occ);
        adag(t, s) = std::sqrt(static_cast<double>(occ[j]));
    }
    return {adag.adjoint(), adag};
}

Op dgamma(const FockBasis& basis, const Eigen::MatrixXcd& one_body) {
    const int K = basis.n_modes();
    if (one_body.rows() != K || one_body.cols() != K) {
        throw std::invalid_argument("dgamma: one-body matrix must be K x K");
    }
    const int d = basis.dim();
    Op out = Op::Zero(d, d);
    std::vector<std::uint8_t> occ;
    for (int s = 0; s < d; ++s) {
        const auto& ns = basis.state(s);
        for (int j = 0; j < K; ++j) {
            if (ns[j] == 0) continue;
            const double fj = std::sqrt(static_cast<double>(ns[j]));
            for (int mm = 0; mm < K; ++mm) {
                if (one_body(mm, j) == 0.0) continue;
                // a^dag_m a_j |ns> ; number conserving, target always in basis
                occ = ns;
                occ[j] -= 1;
                const double fm = std::sqrt(static_cast<double>(occ[mm]) + 1.0);
                occ[mm] += 1;
                const int t = basis.index_of(occ);
                out(t, s) += one_body(mm, j) * fj * fm;
            }
        }
    }
    return out;
}

Op number_operator(const FockBasis& basis) {
    const int d = basis.dim();
    Op n = Op::Zero(d, d);
    for (int s = 0; s < d; ++s) n(s, s) = static_cast<double>(basis.total(s));
    return n;
}

Eigen::MatrixXcd ek_matrix(const ModeSet& m, const Mode& k) {
    const int K = m.size();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(K, K);
    for (int n = 0; n < K; ++n) {
        const Mode target{m.modes[n][0] + k[0], m.modes[n][1] + k[1]};
        const int mm = m.index_of(target);
        if (mm >= 0) a(mm, n) = 1.0;
    }
    return a;
}

Op free_hamiltonian(const FockBasis& basis, const ModeSet& m, double lambda) {
    if (basis.n_modes() != m.size()) {
        throw std::invalid_argument("free_hamiltonian: basis/mode-set size mismatch");
    }
    const int d = basis.dim();
    Op h = Op::Zero(d, d);
    for (int s = 0; s < d; ++s) {
        double e = 0.0;
        const auto& occ = basis.state(s);
        for (int j = 0; j < basis.n_modes(); ++j) e += occ[j] * m.eigenvalues[j];
        h(s, s) = lambda * e;
    }
    return h;
}

Op build_renormalized_hamiltonian(const FockBasis& basis, const ModeSet& m,
                                  const PotentialSpec& p, const RenormConstants& rc,
                                  double lambda) {
    if (basis.n_modes() != m.size()) {
        throw std::invalid_argument("build_renormalized_hamiltonian: basis/mode-set mismatch");
    }
    const int d = basis.dim();
    Op lamH = free_hamiltonian(basis, m, lambda);
    const Op id = Op::Identity(d, d);
    const Op num = number_operator(basis);
    for (const Mode& k : m.differences()) {
        const double w = p.w_hat_eps(k);
        if (w == 0.0) continue;
        Op mk = dgamma(basis, ek_matrix(m, k));
        if (k[0] == 0 && k[1] == 0) mk -= rc.n0 * id;
        lamH += (0.5 * lambda * lambda * w) * (mk.adjoint() * mk);
    }
    lamH -= (lambda * rc.tau) * (num - rc.n0 * id);
    lamH -= rc.e_const * id;
    return lamH;
}

void DensityOperator::validate() const {
    const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm >= 1e-12) throw std::logic_error("DensityOperator: not Hermitian");
    Eigen::SelfAdjointEigenSolver<Op> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        throw std::logic_error("DensityOperator: negative eigenvalue");
    }
    if (std::abs(matrix.trace().real() - 1.0) > 1e-10) {
        throw std::logic_error("DensityOperator: trace != 1");
    }
}

GibbsResult gibbs_state(const Op& exponent) {
    if (exponent.rows() != exponent.cols()) throw std::invalid_argument("gibbs_state: not square");
    if (exponent.rows() > FockBasis::kDenseDimCap) {
        std::ostringstream msg;
        msg << "gibbs_state: dimension " << exponent.rows() << " exceeds the dense cap "
            << FockBasis::kDenseDimCap;
        throw ConfigError(msg.str());
    }
    const double herm = (exponent - exponent.adjoint()).cwiseAbs().maxCoeff();
    if (herm >= 1e-10) throw std::invalid_argument("gibbs_state: exponent is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Op> es(exponent);
    const Eigen::VectorXd e = es.eigenvalues();
    const double e0 = e.minCoeff();
    Eigen::VectorXd boltz(e.size());
    double z = 0.0;
    for (int i = 0; i < e.size(); ++i) {
        boltz(i) = std::exp(-(e(i) - e0));
        z += boltz(i);
    }
    GibbsResult out;
    out.log_partition = -e0 + std::log(z);
    boltz /= z;
    out.state.matrix = es.eigenvectors() * boltz.asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

Eigen::MatrixXcd reduced_density_1(const FockBasis& basis, const Op& gamma) {
    const int K = basis.n_modes();
    Eigen::MatrixXcd g1 = Eigen::MatrixXcd::Zero(K, K);
    std::vector<std::uint8_t> occ;
    for (int u = 0; u < basis.dim(); ++u) {
        const auto& nu = basis.state(u);
        for (int mm = 0; mm < K; ++mm) {
            if (nu[mm] == 0) continue;
            for (int q = 0; q < K; ++q) {
                occ = nu;
                occ[mm] -= 1;
                const double c = std::sqrt(double(nu[mm]) * (occ[q] + 1.0));
                occ[q] += 1;
                const int t = basis.index_of(occ);
                // Tr[a^dag_q a_m Gamma] = sum_u <u|a^dag_q a_m Gamma|u>
                g1(mm, q) += c * gamma(u, t);
            }
        }
    }
    return g1;
}

Eigen::MatrixXcd reduced_density_2(const FockBasis& basis, const Op& gamma) {
    const int K = basis.n_modes();
    Eigen::MatrixXcd g2 = Eigen::MatrixXcd::Zero(K * K, K * K);
    std::vector<std::uint8_t> occ;
    for (int u = 0; u < basis.dim(); ++u) {
        const auto& nu = basis.state(u);
        for (int q = 0; q < K; ++q) {
            if (nu[q] == 0) continue;
            for (int pp = 0; pp < K; ++pp) {
                if (nu[pp] - (pp == q ? 1 : 0) < 1) continue;
                for (int j = 0; j < K; ++j) {
                    for (int i = 0; i < K; ++i) {
                        occ = nu;
                        double c = std::sqrt(static_cast<double>(occ[q]));
                        occ[q] -= 1;
                        c *= std::sqrt(static_cast<double>(occ[pp]));
                        occ[pp] -= 1;
                        c *= std::sqrt(occ[j] + 1.0);
                        occ[j] += 1;
                        c *= std::sqrt(occ[i] + 1.0);
                        occ[i] += 1;
                        const int t = basis.index_of(occ);
                        // (1/2) Tr[a^dag_i a^dag_j a_p a_q Gamma]
                        g2(pp * K + q, i * K + j) += 0.5 * c * gamma(u, t);
                    }
                }
            }
        }
    }
    return g2;
}

double relative_entropy(const Op& gamma, const Op& gamma_prime) {
    Eigen::SelfAdjointEigenSolver<Op> ea(gamma);
    Eigen::SelfAdjointEigenSolver<Op> eb(gamma_prime);
    double tr_a_log_a = 0.0;
    for (int i = 0; i < ea.eigenvalues().size(); ++i) {
        const double pi = ea.eigenvalues()(i);
        if (pi > 1e-300) tr_a_log_a += pi * std::log(pi);
    }
    double tr_a_log_b = 0.0;
    for (int j = 0; j < eb.eigenvalues().size(); ++j) {
        const double qj = eb.eigenvalues()(j);
        const double weight =
            (eb.eigenvectors().col(j).adjoint() * gamma * eb.eigenvectors().col(j))(0).real();
        if (qj < 1e-14) {
            if (weight > 1e-12) {
                throw std::domain_error("relative_entropy: supp(Gamma) not within supp(Gamma')");
            }
            continue;
        }
        tr_a_log_b += weight * std::log(qj);
    }
    return tr_a_log_a - tr_a_log_b;
}

double variance_observable(const Op& gamma, const Op& a, double reference_mean) {
    const Op shifted = a - reference_mean * Op::Identity(a.rows(), a.cols());
    return (shifted.adjoint() * shifted * gamma).trace().real();
}

Op p_localize(const FockBasis& big, const Op& gamma, const std::vector<int>& keep,
              const FockBasis& sub) {
    if (static_cast<int>(keep.size()) != sub.n_modes()) {
        throw std::invalid_argument("p_localize: keep list does not match sub basis");
    }
    std::vector<bool> kept(static_cast<std::size_t>(big.n_modes()), false);
    for (int j : keep) {
        if (j < 0 || j >= big.n_modes()) throw std::invalid_argument("p_localize: bad mode index");
        kept[static_cast<std::size_t>(j)] = true;
    }
    // split each big state into (sub occupation, rest occupation)
    const int d = big.dim();
    std::vector<int> sub_idx(static_cast<std::size_t>(d));
    std::vector<std::uint64_t> rest_key(static_cast<std::size_t>(d));
    std::vector<std::uint8_t> occ_sub(keep.size());
    for (int s = 0; s < d; ++s) {
        const auto& occ = big.state(s);
        std::uint64_t rk = 0;
        int shift = 0;
        for (int j = 0; j < big.n_modes(); ++j) {
            if (!kept[static_cast<std::size_t>(j)]) {
                rk |= std::uint64_t(occ[j]) << shift;
                shift += 8;
            }
        }
        for (std::size_t c = 0; c < keep.size(); ++c) occ_sub[c] = occ[keep[c]];
        sub_idx[s] = sub.index_of(occ_sub);
        rest_key[s] = rk;
        if (sub_idx[s] < 0) throw std::invalid_argument("p_localize: sub basis too small");
    }
    Op out = Op::Zero(sub.dim(), sub.dim());
    // group big states by the traced-out occupation
    std::vector<int> order(static_cast<std::size_t>(d));
    for (int s = 0; s < d; ++s) order[s] = s;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return rest_key[a] < rest_key[b]; });
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && rest_key[order[j]] == rest_key[order[i]]) ++j;
        for (std::size_t a = i; a < j; ++a)
            for (std::size_t b = i; b < j; ++b)
                out(sub_idx[order[a]], sub_idx[order[b]]) += gamma(order[a], order[b]);
        i = j;
    }
    return out;
}

double top_shell_mass(const FockBasis& basis, const Op& gamma) {
    double mass = 0.0;
    for (int s = 0; s < basis.dim(); ++s) {
        if (basis.total(s) == basis.n_max()) mass += gamma(s, s).real();
    }
    return mass;
}

QuantumFreeEnergy projected_relative_free_energy(const ModeSet& m, const PotentialSpec& p,
                                                 double lambda, double shell_tol,
                                                 int n_max_hint) {
    int n_max = std::max(2, n_max_hint);
    for (;;) {
        const double dim_est = [&] {
            double d = 1.0;
            for (int i = 1; i <= m.size(); ++i) d *= double(n_max + i) / i;
            return d;
        }();
        if (dim_est > FockBasis::kDenseDimCap) {
            std::ostringstream msg;
            msg << "projected_relative_free_energy: Fock dimension " << dim_est
                << " at n_max = " << n_max << " exceeds the dense cap "
                << FockBasis::kDenseDimCap;
            throw ConfigError(msg.str());
        }
        const FockBasis basis = FockBasis::build(m.size(), n_max);
        const RenormConstants rc = renorm_constants(m, p, lambda);
        const GibbsResult free = gibbs_state(free_hamiltonian(basis, m, lambda));
        const GibbsResult inter =
            gibbs_state(build_renormalized_hamiltonian(basis, m, p, rc, lambda));
        const double shell =
            std::max(top_shell_mass(basis, free.state.matrix),
                     top_shell_mass(basis, inter.state.matrix));
        if (shell < shell_tol) {
            QuantumFreeEnergy out;
            out.value = -(inter.log_partition - free.log_partition);
            out.n_max = n_max;
            out.dim = basis.dim();
            out.top_shell = shell;
            return out;
        }
        n_max = n_max + std::max(4, n_max / 2);
    }
}

}  // namespace phi4
