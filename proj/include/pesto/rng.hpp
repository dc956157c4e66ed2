#pragma once

#include <cstdint>
#include <random>

namespace pesto {

// Deterministic stream: std::mt19937_64 (fully specified by the standard),
// with bias-free range reduction by rejection on the top bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform value in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % bound;
    }

    bool coin() { return (gen_() & 1) != 0; }

private:
    std::mt19937_64 gen_;
    std::uint64_t seed_;
};

}  // namespace pesto
