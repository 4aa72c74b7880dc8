#pragma once

#include <cstdint>
#include <initializer_list>

namespace rfp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a list of keys into one seed. Order matters.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = mix64(master);
    for (auto k : keys) s = mix64(s ^ mix64(k));
    return s;
}

}  // namespace rfp
