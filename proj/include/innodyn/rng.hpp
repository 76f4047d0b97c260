#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace innodyn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to spread user seeds and to derive substream
// seeds; not used as the simulation generator itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Every random stream in the toolkit is seeded as
// splitmix64(root_seed ^ fnv1a64(stream_label)), so one top-level seed
// reproduces the whole run while independent stages stay decorrelated.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
    return splitmix64(root ^ fnv1a64(stream));
}

inline Rng make_rng(std::uint64_t root, std::string_view stream) {
    return Rng(derive_seed(root, stream));
}

} // namespace innodyn
