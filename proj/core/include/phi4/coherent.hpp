//==============================================================================
// coherent.hpp
// Coherent states on the truncated projected Fock space, lower symbols
// (Husimi densities) at scale lambda, the exact Gaussian oracle for the
// free Gibbs state, de Finetti moment identities, Berezin-Lieb inequality
// checks, and upper-symbol trial states.
//==============================================================================

#pragma once

#include <Eigen/Dense>
#include <functional>

#include "phi4/fock.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

// xi(u/sqrt(lambda)) expanded over the occupation basis; the truncation
// defect is the Poisson(|u|^2/lambda) tail beyond n_max, always reported.
struct CoherentVector {
    Eigen::VectorXcd amplitudes;
    double defect = 0.0;   // 1 - |restricted norm|^2, analytic Poisson tail
    double scale = 1.0;    // lambda
};

/// P(Poisson(mu) > n), computed stably in log space.
double poisson_tail(double mu, int n);

/// Coherent vector at base point u and scale lambda.  Throws ConfigError
/// (instructing an n_max increase) when the truncation defect exceeds
/// `defect_tol`.
CoherentVector coherent_vector(const Eigen::VectorXcd& u, double lambda, const FockBasis& basis,
                               double defect_tol = 1e-8);

/// Lower-symbol density of Gamma_P at u:
///   (lambda pi)^{-K} <xi(u/sqrt(lambda)), Gamma_P xi(u/sqrt(lambda))>.
double lower_symbol_density(const Op& gamma_p, const Eigen::VectorXcd& u, double lambda,
                            const FockBasis& basis, double defect_tol = 1e-6);

/// Exact Husimi density of the free Gibbs state:
///   (1/z0~) exp(-<u, h~ u>),  h~ = diag((1 - e^{-lambda lambda_k})/lambda),
///   z0~ = (lambda pi)^K prod (1 - e^{-lambda lambda_k})^{-1}.
double free_gibbs_husimi_oracle(const Eigen::VectorXcd& u, double lambda, const ModeSet& m);

/// Draws u from the free-oracle Gaussian (the importance-sampling proposal).
Eigen::VectorXcd sample_free_husimi(const ModeSet& m, double lambda, RngStream& rng);

// -- de Finetti moment identities ---------------------------------------------

/// Exact k-th moment of the lower symbol, as an operator on (C^K)^{x k}
/// (k = 1: lambda(Gamma^(1) + I); k = 2: 2 lambda^2 Gamma^(2) + lambda^2 T
/// + 2 lambda^2 P_sym with T the symmetrized Gamma^(1) x I terms).
Eigen::MatrixXcd definetti_rhs_exact(const Op& gamma_p, const FockBasis& basis, double lambda,
                                     int k);

struct DeFinettiResult {
    double residual = 0.0;   // trace norm of (MC moment - exact RHS)
    double mc_sigma = 0.0;   // trace-norm error estimate (3x this is the gate)
    double defect = 0.0;     // truncation-defect budget
    double bound_lhs = 0.0;  // ||k! lambda^k Gamma^(k) - moment||_S1, exact
    double bound_rhs = 0.0;  // lambda^k sum_l C(k,l)^2 (k-l+K-1)!/(K-1)! Tr[N^l Gamma]
    std::int64_t n_samples = 0;
};

/// Monte Carlo check of the de Finetti moment identity for k in {1,2},
/// importance-sampled from the free-oracle Gaussian.  Requires K <= 3.
DeFinettiResult definetti_check(const Op& gamma_p, const FockBasis& basis, const ModeSet& m,
                                double lambda, int k, std::int64_t n_samples, std::uint64_t seed);

// -- Berezin-Lieb inequalities -------------------------------------------------

enum class ConvexTest { XLogX, Square, AbsDev };

double convex_f(ConvexTest f, double x, double c = 0.5);

/// First inequality at K = 1 by deterministic polar quadrature:
///   margin = Tr f(Gamma) - integral of f(husimi * (lambda pi)^K),  >= 0.
double berezin_lieb_first(const Op& gamma, double lambda, const FockBasis& basis, ConvexTest f,
                          double abs_dev_center = 0.5);

/// Radial upper symbol: density r(t) over t = |u|^2/lambda with
/// integral r dt = 1 (so nu(u) du = r(t) dt after the polar change).
using RadialDensity = std::function<double(double)>;

/// The state Gamma_nu = integral nu(u)|xi(u/sqrt l)><xi| du for a radial nu
/// at K = 1, by deterministic quadrature (diagonal in occupation).
Op upper_symbol_state_radial(const RadialDensity& r, double lambda, const FockBasis& basis,
                             double t_max);

/// Second inequality at K = 1:
///   margin = integral f(r(t)) dt - Tr f(Gamma_nu),  >= 0.
double berezin_lieb_second(const RadialDensity& r, double lambda, const FockBasis& basis,
                           ConvexTest f, double t_max, double abs_dev_center = 0.5);

/// Gamma_nu from Monte Carlo points u_i ~ nu (general K).
Op upper_symbol_state_mc(const std::vector<Eigen::VectorXcd>& points, double lambda,
                         const FockBasis& basis, double defect_tol = 1e-6);

/// (lambda pi)^{-K} integral over the ball |u| <= radius of |xi><xi| du at
/// K = 1; approximates the identity on low shells as radius -> infinity.
Op identity_ball_operator(double lambda, const FockBasis& basis, double radius);

/// Classical relative entropy H_cl(mu_Gamma, mu_Gamma') of two lower-symbol
/// densities, by importance sampling from the free oracle:
///   E_{mu'}[r log r], r = density_Gamma / density_Gamma'.
struct HclEstimate {
    double value = 0.0;
    double std_error = 0.0;
};
HclEstimate classical_relative_entropy_mc(const Op& gamma, const Op& gamma_prime,
                                          const FockBasis& basis, const ModeSet& m, double lambda,
                                          std::int64_t n_samples, std::uint64_t seed);

}  // namespace phi4
