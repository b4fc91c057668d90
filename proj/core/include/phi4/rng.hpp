//==============================================================================
// rng.hpp
// Counter-based random streams: one independent stream per (seed, index),
// so Monte Carlo results do not depend on thread count or chunking.
// SplitMix64 core, Box-Muller normals.
//==============================================================================

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace phi4 {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        // decorrelate the (seed, index) pair before using it as a state
        std::uint64_t s = seed ^ 0x5851f42d4c957f2dull;
        detail::splitmix64(s);
        s ^= stream_index * 0xda942042e4dd58b5ull;
        detail::splitmix64(s);
        state_ = s;
    }

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    // uniform in (0,1), never exactly 0 or 1
    double next_uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u == 0.0 ? 0x1.0p-53 : u;
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    std::complex<double> next_complex_normal() {
        // independent N(0,1) real and imaginary parts
        const double a = next_normal();
        const double b = next_normal();
        return {a, b};
    }

  private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Derives a child seed for a named sub-experiment (scan point, suite, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
    detail::splitmix64(s);
    return detail::splitmix64(s);
}

}  // namespace phi4
