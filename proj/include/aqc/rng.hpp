#ifndef AQC_RNG_HPP
#define AQC_RNG_HPP

#include <cstdint>

namespace aqc {

// SplitMix64.  Self-contained so that seeded runs are reproducible across
// platforms and standard libraries; <random> distributions are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d49bb133111aebull;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound), bound >= 1.  Rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    Rng mixer(h ^ (v + 0x9e3779b97f4a7c15ull));
    return mixer.next_u64();
}

// Per-instance seed for ensemble runs: a pure function of the master seed,
// a stream tag, and the instance coordinates, so results do not depend on
// execution order or worker count.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream,
                                 std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = hash_combine(master_seed, stream);
    h = hash_combine(h, a);
    return hash_combine(h, b);
}

}  // namespace aqc

#endif
