#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vomcts {

/// splitmix64 step; used to derive independent seeds from (seed, tag...) paths.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31u);
}

/// Derives a child seed from an ordered list of words. Every random stream in
/// the project is keyed this way off the single master seed.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x243f6a8885a308d3ull;  // arbitrary fixed origin
    std::uint64_t out = 0;
    for (std::uint64_t p : parts) {
        state ^= p;
        out = splitmix64(state);
    }
    return out;
}

/// Stream-name tags for derive_seed paths (documented in the README).
enum class StreamTag : std::uint64_t {
    Scenario = 1,   // master -> per-scenario seed
    Noise = 2,      // scenario -> environment obstacle noise
    Planner = 3,    // scenario + planner id -> planner-private stream
    Bootstrap = 4,  // master -> bootstrap resampling
    Waypoint = 5,   // scenario -> obstacle waypoint placement
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

/// Seeded random stream with uniforms generated directly from raw 64-bit
/// output, so draws are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform index in [0, n). Modulo bias is negligible for the small n used here.
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

private:
    std::mt19937_64 gen_;
};

}  // namespace vomcts
