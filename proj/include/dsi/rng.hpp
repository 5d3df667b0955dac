#pragma once

#include <cstdint>
#include <random>

namespace dsi {

// splitmix64; used to derive independent substreams from (seed, stream index)
// so parallel and serial runs draw identical numbers.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(mix64(seed ^ mix64(stream)));
}

}  // namespace dsi
