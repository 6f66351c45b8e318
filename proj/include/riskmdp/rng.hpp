#pragma once

#include <cstdint>

#include "riskmdp/types.hpp"

namespace riskmdp {

/// SplitMix64 step; also used as the mixing function for counter-mode seeding.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic stream RNG. Episode streams are derived from a master seed
/// and a counter so that runs are reproducible independently of scheduling.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // warm up so that small seeds do not produce correlated leading draws
        splitmix64(state_);
        splitmix64(state_);
    }

    /// Sub-stream for counter `idx` (episode index, grid index, ...).
    static Rng substream(uint64_t master, uint64_t idx) {
        uint64_t s = master;
        uint64_t a = splitmix64(s);
        uint64_t t = a ^ (idx * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        return Rng(t);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    int next_index(int n) {
        int i = int(next_double() * double(n));
        return i >= n ? n - 1 : i;
    }

    /// Uniform double in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Inverse-CDF draw from an unnormalized weight vector.
    int next_categorical(const numvec& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = next_double() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); i++) {
            acc += weights[i];
            if (u < acc) return int(i);
        }
        return int(weights.size()) - 1;
    }

private:
    uint64_t state_;
};

} // namespace riskmdp
