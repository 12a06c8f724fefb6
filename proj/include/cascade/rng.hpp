#pragma once

// Deterministic random streams for Monte Carlo trials.
//
// Every trial owns an independent xoshiro256** stream whose state is derived
// from (master seed, trial index) alone:
//
//   key   = mix64(master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15)
//   state = four successive SplitMix64 outputs starting from key
//
// where mix64 is the SplitMix64 finalizer. Results therefore do not depend on
// how trials are scheduled across threads.

#include <array>
#include <concepts>
#include <cstdint>

namespace cascade {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept { return mix64(state_ += kGoldenGamma); }

private:
    std::uint64_t state_;
};

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    // Stream for one trial of a run seeded with master_seed.
    static RandomStream for_trial(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
        return RandomStream(mix64(master_seed + (trial_index + 1) * kGoldenGamma));
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

// Anything that hands out uniforms on [0, 1). Tests plug in scripted sources.
template <class G>
concept UniformSource = requires(G& g) {
    { g.uniform() } -> std::convertible_to<double>;
};

}  // namespace cascade
