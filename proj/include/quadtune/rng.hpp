#pragma once

#include <cmath>
#include <cstdint>

namespace quadtune {

/// Deterministic stream for optimizer runs: splitmix64 core with
/// platform-independent uniform and Gaussian draws. One stream per run;
/// draw order is initialization first, then per-candidate per-dimension
/// in each generation, so a fixed seed reproduces a run bitwise.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double gaussian() {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace quadtune
