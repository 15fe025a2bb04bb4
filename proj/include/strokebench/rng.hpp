#pragma once

#include <cmath>
#include <cstdint>

namespace strokebench {

// Deterministic, splittable PRNG (xoshiro256++ seeded through splitmix64).
// All pipeline randomness (k-means++ seeding, t-SNE init jitter, fixtures)
// flows from one root seed via split(), so runs are reproducible bit-for-bit
// regardless of the standard library in use. <random> distributions are not
// pinned down by the standard, hence the explicit uniform/normal mappings.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    // Independent child stream; deterministic function of (state, key).
    Rng split(std::uint64_t key) const {
        std::uint64_t x = s_[0] ^ (0x9e3779b97f4a7c15ULL * (key + 1));
        return Rng(splitmix64_once(x ^ s_[2]));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Standard normal via Box-Muller. Draws are paired and cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double std_dev) { return mean + std_dev * normal(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        return splitmix64_once(x);
    }

    static std::uint64_t splitmix64_once(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace strokebench
