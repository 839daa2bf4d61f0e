#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace mfl {

// Deterministic 64-bit splittable generator (splitmix64).  Used for all
// seeded experiment inputs so that identical configs reproduce identical
// numbers on every platform; std::normal_distribution is implementation
// defined and therefore avoided.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0, 1]: never returns 0 so logs are safe.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller with explicit formulas (deterministic).
    double next_normal();

    // Derives an independent stream from (seed, tag words).  Folding the tags
    // through the generator decorrelates streams for different (p, M, ...).
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t tag0, std::uint64_t tag1);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Seeded random Hermitian operator on the symmetric p-sector of an M-mode
// space, normalized to unit spectral norm.  Stream is derived from
// (seed, p, M) only, so the same triple always yields the same matrix.
Eigen::MatrixXcd random_hermitian_sector(std::uint64_t seed, int p, int modes);

} // namespace mfl
