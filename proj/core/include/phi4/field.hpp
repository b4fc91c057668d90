//==============================================================================
// field.hpp
// Samples of the projected Gaussian free field and the four interaction
// functionals evaluated on them:
//   W^eps_K  Wick-ordered smeared quadratic-quadratic interaction (mean zero)
//   V_K      Wick-ordered local quartic
//   V^eps_K  fully Wick-ordered smeared quartic
//   I^eps_K  cross term pinned by the per-sample identity V^eps = W^eps + I^eps
// All functionals are in volume-normalized units (see spectral.hpp).
//==============================================================================

#pragma once

#include <complex>
#include <vector>

#include "phi4/rng.hpp"
#include "phi4/spectral.hpp"

namespace phi4 {

using Complex = std::complex<double>;

// One draw of the projected free field u(x) = sum_k alpha_k e^{ik.x}.
struct FieldSample {
    const ModeSet* mode_set = nullptr;
    std::vector<Complex> alpha;
};

// u (or a derived density) tabulated on a uniform n x n grid.
struct GridField {
    int n = 0;
    std::vector<Complex> values;  // row-major, x = 2*pi*(i,j)/n
    Complex& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
    const Complex& at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
};

/// alpha_k = (xi1 + i xi2)/sqrt(2 lambda_k), xi ~ N(0,1) independent per mode,
/// so E|alpha_k|^2 = 1/lambda_k.
FieldSample sample_free_field(const ModeSet& m, RngStream& rng);

/// Smallest power of two >= 4*max_abs_index + 2; alias-free for all
/// functionals below.
int auto_grid(const ModeSet& m);

/// Evaluates the band-limited field on an n x n grid (inverse FFT).
/// Requires n >= 2*max_abs_index + 2.
GridField to_grid(const FieldSample& f, int n_grid);

/// Fourier coefficients F[g](k) = (normalized) forward FFT of a grid field;
/// result indexed like the grid, frequency k stored at (k mod n).
std::vector<Complex> grid_coefficients(const GridField& g);

/// Coefficient of e^{ik.x} from a coefficient table, 0 outside support.
Complex coeff_at(const std::vector<Complex>& coeffs, int n, const Mode& k);

/// Wick density rho(x) = |u(x)|^2 - c_K on the grid (real-valued).
/// Requires n_grid >= 2*max_abs_index + 2 (exact u values, exact avg rho).
GridField wick_density(const FieldSample& f, double c_K, int n_grid);

/// W^eps_K[u] = 1/2 sum_k w_hat(eps k)|F[rho](k)|^2 - tau F[rho](0) - e_const.
/// The quadratic sum needs F[rho] on its full support |k| <= 2*max_abs_index,
/// hence n_grid >= 4*max_abs_index + 2.
double interaction_w(const FieldSample& f, const PotentialSpec& p, const RenormConstants& rc,
                     int n_grid);

/// V_K[u] = 1/2 avg(|u|^4 - 4 c_K |u|^2 + 2 c_K^2), exact grid quadrature
/// for n_grid >= 4*max_abs_index + 2.
double interaction_v_local(const FieldSample& f, double c_K, int n_grid);

/// V^eps_K[u] = 1/2 avg_x avg_y w^eps(x-y) :|u(x)|^2 |u(y)|^2: (full Wick
/// ordering of the quartic monomial), computed spectrally.
double interaction_v_smeared(const FieldSample& f, const PotentialSpec& p,
                             const RenormConstants& rc, int n_grid);

/// I^eps_K[u] = V^eps_K[u] - W^eps_K[u], evaluated from its own expansion
/// (Green-function cross term); the identity holds per sample to 1e-8 rel.
double cross_term_i(const FieldSample& f, const PotentialSpec& p, const RenormConstants& rc,
                    int n_grid);

// -- reference evaluators (direct O(K^2)/O(K^3) mode sums, no FFT) -----------
// Same quantities through an independent numerical route; used by the golden
// spectral-vs-direct checks and the verify suites.
namespace reference {
std::vector<std::pair<Mode, Complex>> rho_coeffs_direct(const FieldSample& f, double c_K);
double interaction_w_direct(const FieldSample& f, const PotentialSpec& p,
                            const RenormConstants& rc);
double interaction_v_local_direct(const FieldSample& f, double c_K);
double interaction_v_smeared_direct(const FieldSample& f, const PotentialSpec& p,
                                    const RenormConstants& rc);
double cross_term_i_direct(const FieldSample& f, const PotentialSpec& p,
                           const RenormConstants& rc);
}  // namespace reference

/// Convolution coefficient gamma_m = sum_{p in modes} w_hat(eps(m-p))/lambda_p
/// (Fourier coefficients of w^eps * G_K restricted to the mode set).
double weighted_green_coeff(const ModeSet& m, const PotentialSpec& p, const Mode& mode);

/// Exact L^2(mu_{0,K}) norm of I^eps_K: I is a diagonal quadratic form in the
/// field, ||I||^2 = sum_m (tau - gamma_m)^2 / lambda_m^2.
double i_norm_exact(const ModeSet& m, const PotentialSpec& p, const RenormConstants& rc);

/// Lower bound -tau^2/(2 w_hat(0)) - e_const <= W^eps_K[u] (k = 0 Young bound).
double w_lower_bound(const PotentialSpec& p, const RenormConstants& rc);

}  // namespace phi4
