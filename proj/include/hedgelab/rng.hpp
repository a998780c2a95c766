#pragma once

#include <cstdint>

#include "hedgelab/gaussian.hpp"

namespace hedgelab {

/// Philox4x32-10 counter-based generator (Salmon et al. round constants).
/// A draw is a pure function of (key, counter); streams never share state,
/// so results are independent of execution order and thread count.
namespace philox {

struct block {
    uint32_t v[4];
};

inline void round_once(uint32_t* ctr, const uint32_t* key) {
    constexpr uint64_t M0 = 0xD2511F53ull;
    constexpr uint64_t M1 = 0xCD9E8D57ull;
    const uint64_t p0 = M0 * ctr[0];
    const uint64_t p1 = M1 * ctr[2];
    const uint32_t c0 = static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
    const uint32_t c1 = static_cast<uint32_t>(p1);
    const uint32_t c2 = static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
    const uint32_t c3 = static_cast<uint32_t>(p0);
    ctr[0] = c0;
    ctr[1] = c1;
    ctr[2] = c2;
    ctr[3] = c3;
}

inline block generate(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo) {
    constexpr uint32_t W0 = 0x9E3779B9u; // golden-ratio key schedule increments
    constexpr uint32_t W1 = 0xBB67AE85u;
    uint32_t c[4] = {static_cast<uint32_t>(ctr_lo), static_cast<uint32_t>(ctr_lo >> 32),
                     static_cast<uint32_t>(ctr_hi), static_cast<uint32_t>(ctr_hi >> 32)};
    uint32_t k[2] = {static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32)};
    for (int r = 0; r < 10; ++r) {
        round_once(c, k);
        k[0] += W0;
        k[1] += W1;
    }
    return block{{c[0], c[1], c[2], c[3]}};
}

} // namespace philox

/// SplitMix64 finalizer; used to derive well-mixed per-path keys.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Key for one simulated path: a hash of (master_seed, path_index).
inline uint64_t path_seed(uint64_t master_seed, uint64_t path_index) {
    return mix64(master_seed ^ mix64(path_index + 0x632BE59BD9B4E019ull));
}

/// Uniform in (0,1) from 52 random bits, never returning 0 or 1. A 53-bit
/// ladder would round its top rung up to exactly 1.0; with 52 bits the
/// largest value is 1 - 2^-53 and the smallest 2^-53, both representable.
inline double uniform_from_bits(uint32_t hi, uint32_t lo) {
    const uint64_t u = (static_cast<uint64_t>(hi) << 32) | lo;
    return static_cast<double>(u >> 12) * 0x1.0p-52 + 0x1.0p-53;
}

/// Counter-addressed Gaussian stream for one path.
///
/// Draws are indexed by (step, channel); one Philox block serves channels
/// {0,1} of a step (price and volatility shocks), a second block serves
/// channels {2,3} (bridge refinement). Identical (seed, step, channel)
/// always yields the identical variate.
class PathRng {
public:
    explicit PathRng(uint64_t seed) : seed_(seed) {}

    uint64_t seed() const { return seed_; }

    /// Standard normal for the given grid step and channel (0..3).
    double normal(uint64_t step, unsigned channel) const {
        const philox::block b = philox::generate(seed_, channel >> 1, step);
        const unsigned base = (channel & 1u) << 1;
        return norm_cdf_inv(uniform_from_bits(b.v[base], b.v[base + 1]));
    }

    /// Price and volatility shocks of one step from a single Philox call.
    void normal_pair(uint64_t step, double& z_price, double& z_vol) const {
        const philox::block b = philox::generate(seed_, 0, step);
        z_price = norm_cdf_inv(uniform_from_bits(b.v[0], b.v[1]));
        z_vol = norm_cdf_inv(uniform_from_bits(b.v[2], b.v[3]));
    }

private:
    uint64_t seed_;
};

} // namespace hedgelab
