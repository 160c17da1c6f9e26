#pragma once

#include "kbandit/common.hpp"

#include <cmath>
#include <cstdint>

namespace kbandit {

/// Counter-based pseudo-random stream. A stream is keyed by
/// (seed, round, stream id) and produces draws by mixing an incrementing
/// counter through a splitmix64 finalizer, so any draw is reproducible
/// from its key alone and independent of how other streams are consumed.
class CounterRng {
public:
    static CounterRng keyed(std::uint64_t seed, std::uint64_t round, std::uint64_t stream = 0) {
        std::uint64_t k = mix(seed + 0x9e3779b97f4a7c15ULL);
        k = mix(k ^ (round * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
        k = mix(k ^ (stream * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL));
        return CounterRng(k);
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (platform-independent, unlike
    /// std::normal_distribution).
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Inverse-CDF draw from a finite distribution given by non-negative
    /// weights summing to ~1.
    Index next_categorical(const Vector& probs) {
        const double u = next_unit();
        double acc = 0.0;
        for (Index i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.size() - 1;  // guard against rounding in the prefix sums
    }

private:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace kbandit
