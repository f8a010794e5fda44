#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

namespace fairseed {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 12) + (a >> 4)));
}

// Derives a decorrelated child seed from a master seed and a stream path,
// e.g. child_seed(master, stream::simulate, realization_index). Every unit of
// work gets its own stream so results do not depend on scheduling.
template <typename... Ids>
constexpr std::uint64_t child_seed(std::uint64_t master, Ids... ids) {
    std::uint64_t s = splitmix64(master);
    ((s = mix_seed(s, static_cast<std::uint64_t>(ids))), ...);
    return s;
}

// Stream tags used when fanning a master seed out to subsystems.
namespace stream {
inline constexpr std::uint64_t simulate = 1;
inline constexpr std::uint64_t benchmark = 2;
inline constexpr std::uint64_t critical = 3;
inline constexpr std::uint64_t heuristic = 4;
inline constexpr std::uint64_t generator = 5;
inline constexpr std::uint64_t ga_init = 6;
inline constexpr std::uint64_t ga_select = 7;
inline constexpr std::uint64_t ga_vary = 8;
inline constexpr std::uint64_t ga_eval = 9;
inline constexpr std::uint64_t ga_final = 10;
inline constexpr std::uint64_t numeric_eval = 11;
inline constexpr std::uint64_t trace_dump = 12;
}  // namespace stream

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

// Bernoulli(p) via one 64-bit draw against a fixed threshold.
class Coin {
public:
    explicit Coin(double p)
        : threshold_(p < 1.0 ? static_cast<std::uint64_t>(std::ldexp(p < 0.0 ? 0.0 : p, 64)) : 0),
          always_(p >= 1.0) {}

    bool flip(Engine& rng) const { return always_ || rng() < threshold_; }

private:
    std::uint64_t threshold_;
    bool always_;
};

// Uniform k-subset of {0,...,n-1} without replacement (Floyd's algorithm).
// Output order is the insertion order, not uniform over permutations.
inline std::vector<std::int32_t> sample_distinct(std::int32_t n, std::int32_t k, Engine& rng) {
    std::vector<std::int32_t> out;
    out.reserve(static_cast<std::size_t>(k));
    std::unordered_set<std::int32_t> seen;
    seen.reserve(static_cast<std::size_t>(k) * 2);
    for (std::int32_t j = n - k; j < n; ++j) {
        std::int32_t t = static_cast<std::int32_t>(
            std::uniform_int_distribution<std::int64_t>(0, j)(rng));
        if (seen.insert(t).second) {
            out.push_back(t);
        } else {
            seen.insert(j);
            out.push_back(j);
        }
    }
    return out;
}

}  // namespace fairseed
