#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace kashin {

// Samplers are pinned to explicit formulas (not std::*_distribution, whose
// output is implementation-defined) so that seeded operators regenerate
// identically wherever the same artifact is read back.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal sampler, Box-Muller, caches the spare deviate.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform_unit(gen_); // (0, 1]
        const double u2 = uniform_unit(gen_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::mt19937_64& raw() { return gen_; }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace kashin
