//==============================================================================
// fock.hpp
// Truncated bosonic Fock space over the projected modes: occupation-number
// basis with a total-particle cutoff, creation/annihilation operators,
// second quantization, the renormalized Hamiltonian, Gibbs states, reduced
// density matrices, relative entropy, variance observables, P-localization.
//==============================================================================

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "phi4/field.hpp"
#include "phi4/spectral.hpp"

namespace phi4 {

using Op = Eigen::MatrixXcd;

// Occupation vectors n with sum n_j <= n_max, graded lexicographic order
// (total number first, then lex).  dimension = C(n_max + K, K).
class FockBasis {
  public:
    static constexpr int kMaxModes = 8;      // occupation packing limit
    static constexpr int kDenseDimCap = 8000;  // dense-eigensolver ceiling

    static FockBasis build(int n_modes, int n_max);

    int n_modes() const { return n_modes_; }
    int n_max() const { return n_max_; }
    int dim() const { return static_cast<int>(states_.size()); }

    const std::vector<std::uint8_t>& state(int i) const { return states_[i]; }
    int total(int i) const { return totals_[i]; }

    // index of an occupation vector, or -1
    int index_of(const std::vector<std::uint8_t>& occ) const;

  private:
    int n_modes_ = 0;
    int n_max_ = 0;
    std::vector<std::vector<std::uint8_t>> states_;
    std::vector<int> totals_;
    std::vector<std::uint64_t> keys_;  // packed occupations, sorted with states
    int find_key(std::uint64_t key) const;
};

/// Creation operator for mode j: a^dag_j |n> = sqrt(n_j+1) |n + e_j|, zero
/// past the total cutoff.  Returns (a_j, a^dag_j).
std::pair<Op, Op> build_ladder(const FockBasis& basis, int j);

/// dGamma(A) = sum_{m,n} A_{mn} a^dag_m a_n for a K x K one-body matrix.
Op dgamma(const FockBasis& basis, const Eigen::MatrixXcd& one_body);

/// Number operator dGamma(I).
Op number_operator(const FockBasis& basis);

/// One-body matrix of the projected multiplication operator e_k^- = P e_k P
/// in the normalized plane-wave basis: <phi_m, e_k phi_n> = delta_{m,n+k}.
Eigen::MatrixXcd ek_matrix(const ModeSet& m, const Mode& k);

/// lambda * dGamma(Ph) (diagonal).
Op free_hamiltonian(const FockBasis& basis, const ModeSet& m, double lambda);

/// The renormalized projected Hamiltonian, returned as lambda*H:
///   lambda dGamma(Ph)
///   + (lambda^2/2) sum_{k in diffs} w_hat(eps k) M_k^dag M_k,
///     M_k = dGamma(e_k^-) - delta_{k,0} N0^P
///   - lambda tau (N - N0^P) - E.
Op build_renormalized_hamiltonian(const FockBasis& basis, const ModeSet& m,
                                  const PotentialSpec& p, const RenormConstants& rc,
                                  double lambda);

struct DensityOperator {
    Op matrix;
    /// Hermiticity, eigenvalues >= -1e-12, trace = 1 +- 1e-10.
    void validate() const;
};

struct GibbsResult {
    DensityOperator state;
    double log_partition = 0.0;  // log Tr e^{-H}, shift-corrected
};

/// Gibbs state of a Hermitian H (given as the full exponent, e.g. lambda*H).
/// Throws std::invalid_argument for non-Hermitian input, ConfigError above
/// the dense-diagonalization cap.
GibbsResult gibbs_state(const Op& exponent);

/// Gamma^(1)_{mq} = Tr[a^dag_q a_m Gamma], K x K.
Eigen::MatrixXcd reduced_density_1(const FockBasis& basis, const Op& gamma);

/// Two-body matrix R[(p,q),(i,j)] = (1/2) Tr[a^dag_i a^dag_j a_p a_q Gamma]
/// on the full K^2 tensor index (supported on the symmetric subspace), so
/// that trace R = <N(N-1)>/2.
Eigen::MatrixXcd reduced_density_2(const FockBasis& basis, const Op& gamma);

/// H(Gamma, Gamma') = Tr[Gamma(log Gamma - log Gamma')] >= 0.  Eigenvalues of
/// Gamma' below 1e-14 must carry Gamma-weight below 1e-12 (support check),
/// otherwise std::domain_error.
double relative_entropy(const Op& gamma, const Op& gamma_prime);

/// Tr[(A - m)^dag (A - m) Gamma] >= 0.
double variance_observable(const Op& gamma, const Op& a, double reference_mean);

/// Partial trace onto the Fock space of the modes listed in `keep`
/// (positions within the big basis mode list, strictly increasing).
Op p_localize(const FockBasis& big, const Op& gamma, const std::vector<int>& keep,
              const FockBasis& sub);

/// Occupation probability of the top shell (total == n_max); the truncation
/// diagnostic that gates accepted runs.
double top_shell_mass(const FockBasis& basis, const Op& gamma);

struct QuantumFreeEnergy {
    double value = 0.0;  // -log(Z_P / Z_{0,P})
    int n_max = 0;
    int dim = 0;
    double top_shell = 0.0;  // max over the free and interacting states
};

/// Computes -log(Z_P/Z_{0,P}) with n_max raised adaptively until the top
/// shell of both Gibbs states is below `shell_tol`.  ConfigError when the
/// dense cap would be exceeded.
QuantumFreeEnergy projected_relative_free_energy(const ModeSet& m, const PotentialSpec& p,
                                                 double lambda, double shell_tol = 1e-6,
                                                 int n_max_hint = 8);

}  // namespace phi4
