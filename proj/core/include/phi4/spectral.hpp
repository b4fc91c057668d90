//==============================================================================
// spectral.hpp
// Mode lattice of h = -Delta + 1 on the torus [0,2pi]^2, truncated Green
// function, interaction potential in Fourier space, and the renormalization
// constants (Wick mass, tau, E, N0).
//
// Conventions (fixed here, used everywhere else):
//   * dual lattice Z^2, dispersion lambda_k = |k|^2 + 1, plane waves e^{ik.x}
//   * torus integrals are volume-normalized: avg f = (2pi)^{-2} int f dx,
//     so {e^{ik.x}} is an orthonormal family and Fourier coefficients are
//     F[f](k) = avg of f e^{-ik.x}.  Quantities in ordinary Lebesgue units
//     carry one factor kTorusVolume per torus integral (see to_volume_units).
//==============================================================================

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace phi4 {

// Thrown when a configuration asks for something the numerics cannot honor
// (aliasing grids, oversized dense problems, theorem-violating exponents).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTorusVolume = 4.0 * kPi * kPi;  // |T^2| = (2pi)^2

/// Lebesgue-unit value of a quantity defined with n volume-normalized
/// torus integrals.
inline double to_volume_units(double normalized, int n_integrals) {
    double s = normalized;
    for (int i = 0; i < n_integrals; ++i) s *= kTorusVolume;
    return s;
}

using Mode = std::array<int, 2>;

struct ModeHash {
    std::size_t operator()(const Mode& k) const noexcept {
        auto a = static_cast<std::uint64_t>(static_cast<std::uint32_t>(k[0]));
        auto b = static_cast<std::uint64_t>(static_cast<std::uint32_t>(k[1]));
        return static_cast<std::size_t>(a * 0x9e3779b97f4a7c15ull ^ (b + 0x7f4a7c15u));
    }
};

// The finite set { k in Z^2 : |k|^2 + 1 <= cutoff }, lexicographically ordered.
// Shared index space for field coefficients and Fock modes.
class ModeSet {
  public:
    double cutoff = 0.0;
    std::vector<Mode> modes;
    std::vector<double> eigenvalues;  // lambda_k = |k|^2 + 1, same order

    int size() const { return static_cast<int>(modes.size()); }

    // index of k, or -1
    int index_of(const Mode& k) const {
        auto it = index_.find(k);
        return it == index_.end() ? -1 : it->second;
    }
    bool contains(const Mode& k) const { return index_.count(k) != 0; }

    // max |k_i| over modes and both axes; grid sizes are derived from this
    int max_abs_index() const { return max_abs_; }

    // ordered list of pairwise differences {m - n : m,n in modes}, computed
    // on demand (quadratic in K; meant for desk-scale mode sets)
    std::vector<Mode> differences() const;

    friend ModeSet build_mode_set(double cutoff);
    friend ModeSet build_mode_set_explicit(std::vector<Mode> modes);

  private:
    std::unordered_map<Mode, int, ModeHash> index_;
    int max_abs_ = 0;
};

/// All lattice points with |k|^2 + 1 <= cutoff.  Throws std::domain_error for
/// cutoff < 1 (the projector must contain k = 0).
ModeSet build_mode_set(double cutoff);

/// Mode set from an explicit list (deduplicated, sorted).  The list must be
/// closed under negation; cutoff is set to max lambda_k.
ModeSet build_mode_set_explicit(std::vector<Mode> modes);

// Interaction potential in Fourier space: w_hat(k) >= 0, w_hat(0) = 1,
// radially symmetric families, evaluated at the scaled argument eps*k.
struct PotentialSpec {
    enum class Family { Gaussian, PointK0 };

    Family family = Family::Gaussian;
    double width = 1.0;    // Gaussian: w_hat(k) = exp(-width^2 |k|^2)
    double epsilon = 1.0;  // range parameter, in (0,1]
    double smoothness_budget = 1e12;  // bound on sum w_hat(k)(1+|k|^2)

    // w_hat evaluated at the unscaled lattice point k
    double w_hat(const Mode& k) const { return w_hat_sq(double(k[0]) * k[0] + double(k[1]) * k[1]); }
    // w_hat(eps * k)
    double w_hat_eps(const Mode& k) const {
        return w_hat_sq(epsilon * epsilon * (double(k[0]) * k[0] + double(k[1]) * k[1]));
    }
    double w_hat_sq(double k2) const;

    /// Validates w_hat(0)=1, positivity, and the smoothness budget on the
    /// truncated sum over `support`.  Throws std::domain_error on violation.
    void validate(const std::vector<Mode>& support) const;
};

// Counterterm bundle for a given (ModeSet, PotentialSpec, lambda), in
// volume-normalized units:
//   c_K    = sum 1/lambda_k                       (Wick mass, = G_K(0))
//   tau    = sum w_hat(eps k)/lambda_k            (avg of w^eps G_K)
//   e_const= 1/2 sum_k w_hat(eps k) F[G_K^2](k)   (makes E[W^eps_K] = 0)
//   n0     = sum 1/(e^{lambda lambda_k} - 1)      (projected N0)
struct RenormConstants {
    double c_K = 0.0;
    double tau = 0.0;
    double e_const = 0.0;
    double n0 = 0.0;
    double lambda = 0.0;
    double volume = kTorusVolume;
};

RenormConstants renorm_constants(const ModeSet& m, const PotentialSpec& p, double lambda);

/// F[G_K^2](k) = sum_{p, k-p in modes} 1/(lambda_p lambda_{k-p}); exact
/// convolution of the finite Fourier support of G_K.
double green_sq_coeff(const ModeSet& m, const Mode& k);

/// Truncated Green function G_K(x) = sum_k e^{ik.x}/lambda_k (real by the
/// +-k symmetry of the mode set; the imaginary part is asserted < 1e-12).
double green_truncated(const std::array<double, 2>& x, const ModeSet& m);

/// Full-lattice N0(lambda) = sum_{k in Z^2} 1/(e^{lambda(|k|^2+1)}-1), summed
/// with an adaptive radius to relative tail < 1e-12.  Requires lambda > 0.
double n0_full_lattice(double lambda);

struct N0Row {
    double lambda;
    double n0_full;
    double ratio;  // N0 * lambda / ((2pi)^2 |log lambda|), -> 1/(4pi)
};

struct CountertermPoint {
    double epsilon = 0.0;
    double cutoff = 0.0;
    double tau = 0.0;
    double e_const = 0.0;
};

/// (tau^eps_K, E^eps_K) along an epsilon list with cutoff = factor * eps^{-2},
/// for cutoffs far beyond what a materialized ModeSet can handle.  tau is a
/// direct lattice sum; E uses an exact even-even DCT convolution of the
/// truncated Green coefficients.  Matches renorm_constants bit-for-bit at
/// small cutoffs up to convolution round-off.
std::vector<CountertermPoint> counterterm_asymptotics(const PotentialSpec& family,
                                                      const std::vector<double>& eps_list,
                                                      double cutoff_factor);

/// Table of the free-state particle-number asymptotics.  The last column is
/// the particle density coefficient N0 lambda / (|T^2| |log lambda|), which
/// approaches 1/(4pi) from above.  Throws std::domain_error unless every
/// lambda is in (0,1).
std::vector<N0Row> n0_asymptotics_check(const std::vector<double>& lambdas);

}  // namespace phi4
