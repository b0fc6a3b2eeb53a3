#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ocql {

// splitmix64 finalizer; used to derive independent child seeds from a base seed
// so results do not depend on which thread runs which task.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> path) {
    uint64_t s = mix64(base);
    for (uint64_t p : path) s = mix64(s ^ mix64(p));
    return s;
}

inline std::mt19937_64 make_rng(uint64_t base, std::initializer_list<uint64_t> path) {
    return std::mt19937_64(derive_seed(base, path));
}

}  // namespace ocql
