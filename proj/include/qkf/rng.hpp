#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qkf {

// Deterministic stream derivation: every consumer of randomness gets its own
// engine seeded from (master seed, tag words).  Results are then independent
// of thread scheduling and execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t t : tags) s = splitmix64(s ^ t);
    return s;
}

inline std::mt19937_64 derive_stream(std::uint64_t master,
                                     std::initializer_list<std::uint64_t> tags) {
    return std::mt19937_64(derive_seed(master, tags));
}

}  // namespace qkf
