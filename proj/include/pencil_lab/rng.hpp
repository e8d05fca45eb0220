#pragma once

#include <cstdint>

#include "pencil_lab/rational.hpp"

namespace pencil_lab {

// Deterministic, platform-independent PRNG (splitmix64). std engines are
// reproducible but the distributions are not, so we roll our own draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    Rat small_rat(std::int64_t lo, std::int64_t hi) { return Rat(range(lo, hi)); }

private:
    std::uint64_t state_;
};

} // namespace pencil_lab
