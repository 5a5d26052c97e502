#pragma once

#include <cstdint>
#include <random>

namespace ppmm {

/// Reproducible variate source: 64-bit Mersenne Twister (mt19937_64, the
/// standard parameter set) seeded with the raw seed. Uniforms take the top
/// 53 bits; normals use Marsaglia's polar method, caching the second draw.
/// Nothing depends on implementation-defined standard distributions, so a
/// given seed yields the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal();

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ppmm
