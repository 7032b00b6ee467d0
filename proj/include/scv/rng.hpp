#pragma once

#include <cstdint>
#include <vector>

#include "scv/matrix.hpp"

namespace scv {

// Deterministic, platform-independent randomness. Every sampled object in a
// sweep is derived from (seed, sample index) alone, so results do not depend
// on thread count or iteration order.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator with hand-rolled uniform/normal conversions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64_next(sm);
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

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller; the spare value is cached.
    double normal();

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Independent substream for one sample of a sweep.
Rng stream_for(std::uint64_t seed, std::uint64_t index);

/// Entries i.i.d. uniform on [-half_width, half_width].
SquareMatrix random_box_matrix(Rng& rng, int n, double half_width);

/// Haar-distributed rotation in SO(n): QR of a Gaussian matrix with the
/// positive-diagonal convention, then a determinant sign correction.
SquareMatrix random_rotation(Rng& rng, int n);

/// t * Q with t uniform on [0, tmax]; Q in SO(n) for the plus cone,
/// composed with the reflected identity for the minus cone.
SquareMatrix random_conformal(Rng& rng, int n, double tmax, Sign sign);

/// Strictly ordered positive values in [lo, hi], descending, with adjacent
/// gaps of at least min_gap * max(1, largest).
std::vector<double> random_ordered_spectrum(Rng& rng, int n, double lo, double hi,
                                            double min_gap);

}  // namespace scv
