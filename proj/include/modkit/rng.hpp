#pragma once

#include <array>
#include <cstdint>

namespace modkit {

namespace detail {

// SplitMix64 finalizer. Used both to expand seeds and to derive sub-streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Seeded 64-bit generator (xoshiro256++). Same seed gives the same sequence on
// every platform; sub-streams derived from (base_seed, index) are disjoint by
// construction. Single-owner: never share an instance across threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    // Pure derivation: child seed = mix(mix(base) ^ mix(index + phi)).
    static std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
        std::uint64_t a = base_seed;
        std::uint64_t b = index + 0x9E3779B97F4A7C15ULL;
        std::uint64_t ma = detail::splitmix64(a);
        std::uint64_t mb = detail::splitmix64(b);
        std::uint64_t c = ma ^ detail::rotl(mb, 17);
        return detail::splitmix64(c);
    }

    static RngStream derive(std::uint64_t base_seed, std::uint64_t index) {
        return RngStream(derive_seed(base_seed, index));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); safe under log().
    double next_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer on [0, bound) without modulo bias (Lemire-style rejection).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace modkit
