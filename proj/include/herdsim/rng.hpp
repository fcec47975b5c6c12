#pragma once

#include <cstdint>
#include <random>

namespace herdsim {

using Rng = std::mt19937_64;

/// Independent logical substreams derived from one user seed. Keeping the
/// fundamentalist, mood, and order-flow draws on separate streams means a
/// trajectory of one component is unchanged when another component is
/// frozen or reconfigured.
enum class Stream : std::uint64_t {
    fundamentalist = 0,
    mood = 1,
    order_flow = 2,
    micro = 3,
    reduced = 4,
    shuffle = 5,
    init = 6,
};

/// splitmix64 finalizer over (seed, stream); decorrelates nearby seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, Stream stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(stream) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, Stream stream) {
    return Rng(mix_seed(seed, stream));
}

} // namespace herdsim
