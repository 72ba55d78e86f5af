#pragma once

#include <cstdint>

namespace seqmodel {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based generator: output i is a hash of (key, i). Streams keyed by
// (seed, stream) share no state, so independently keyed trials can run in
// parallel and still reproduce bit-for-bit.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(splitmix64(seed ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL))) {}

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased uniform in [0, bound); bound must be positive
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Deterministic seed derivation for (base seed, grid index, trial index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(base ^ splitmix64(a ^ splitmix64(b ^ 0x9e3779b97f4a7c15ULL)));
}

}  // namespace seqmodel
