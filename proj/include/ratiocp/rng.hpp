#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace ratiocp {

/// Engine behind every simulated quantity in the library.
using Rng = std::mt19937_64;

/// Recorded in table provenance so results can be regenerated.
inline constexpr std::string_view kRngName = "mt19937_64+splitmix64-substreams";

/// One step of the splitmix64 generator; advances `state`.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives a sub-stream seed from a master seed and a path of indices,
/// e.g. (master, cell, replication). Each index is folded in through splitmix64,
/// so distinct paths give unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path = {}) noexcept {
    std::uint64_t state = seed;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t index : path) {
        state = out ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
        out = splitmix64(state);
    }
    return out;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
    return Rng(derive_seed(seed, path));
}

}  // namespace ratiocp
