#pragma once

#include <cstdint>
#include <random>

namespace dsqe {

// splitmix64 step; used both as a stream-derivation mixer and to seed
// std::mt19937_64 from small user seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derive an independent substream seed from a base seed and a tag sequence.
// Used so that every (grid point, shots) combination samples from its own
// stream while identical tags reproduce identical streams.
inline std::uint64_t derive_stream(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag, Rest... rest) {
    return derive_stream(splitmix64(seed ^ splitmix64(tag)), rest...);
}

// Uniform double in [0,1) with the full 53-bit mantissa, independent of the
// standard library's unspecified distribution implementations.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace dsqe
