#pragma once

#include <cstdint>

namespace nbg {

/// Deterministic 64-bit generator (splitmix64). Used everywhere randomness
/// is needed so that a run is a pure function of the seed; substreams derived
/// via substream() are independent of how much the parent stream was consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n). Rejection sampling, exact for any n >= 1.
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    bool coin() noexcept { return next() >> 63; }

    /// Child stream keyed by `key`, decoupled from this stream's position.
    Rng substream(std::uint64_t key) const noexcept {
        Rng child(state_ ^ (0xD1B54A32D192ED03ull * (key + 1)));
        child.next();
        return child;
    }

private:
    std::uint64_t state_;
};

}  // namespace nbg
