#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace qisomap {

// All randomness flows from one root seed; each stage pulls a named stream so
// budget changes in one stage do not shift another stage's draws.
inline std::mt19937_64 stage_rng(std::uint64_t seed, const std::string& stage) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : stage) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace qisomap
