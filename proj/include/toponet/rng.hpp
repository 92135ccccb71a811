#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace toponet {

/// Seeded generator with explicitly defined mappings to doubles.
///
/// std::mt19937_64 output is pinned by the standard, but the standard
/// distributions are implementation-defined, so uniform/normal draws are
/// mapped by hand here: uniform() takes the top 53 bits, normal() is
/// Box-Muller consuming exactly two uniforms per call. Same seed, same
/// stream, on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Uniform integer in [0, n), rejection sampled.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return x % n;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace toponet
