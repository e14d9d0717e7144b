#ifndef CGCLAB_RNG_HPP
#define CGCLAB_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace cgclab {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Deterministic xoshiro256** stream. All stochastic components derive a named
// substream from the run's single 64-bit seed, so results are bit-reproducible
// across platforms (no std::distribution internals involved).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_)
            word = detail::splitmix64(sm);
    }

    // Seed of the stream a named substream would use; handy when an API takes
    // a raw seed instead of an Rng.
    static std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) {
        std::uint64_t sm = seed ^ detail::fnv1a64(name);
        return detail::splitmix64(sm);
    }

    Rng substream(std::string_view name) const {
        return Rng(derive_seed(seed_, name));
    }

    Rng substream(std::string_view name, std::uint64_t index) const {
        std::uint64_t sm = seed_ ^ detail::fnv1a64(name) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        return Rng(detail::splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, bound). bound must be nonzero.
    std::uint64_t uniform_below(std::uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double real01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Box-Muller; one value per call, deterministic draw count (2 uniforms).
    double normal(double sigma = 1.0) {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = real01();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace cgclab

#endif  // CGCLAB_RNG_HPP
