#pragma once

#include <cstdint>
#include <random>

namespace sbreak {

/// SplitMix64 finaliser; used to derive well-separated stream keys.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/**
 * @brief Keyed random stream.
 *
 * A stream is identified by (seed, stream index). Replication r of a
 * simulation always draws from stream r, so the numbers it sees do not
 * depend on how replications are distributed over threads.
 */
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) {
        const std::uint64_t k1 = splitmix64(seed);
        const std::uint64_t k2 = splitmix64(k1 ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
        const std::uint64_t k3 = splitmix64(k2);
        std::seed_seq seq{static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32),
                          static_cast<std::uint32_t>(k3), static_cast<std::uint32_t>(k3 >> 32)};
        engine_.seed(seq);
    }

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(engine_);
    }
    std::uint64_t next_u64() { return engine_(); }

    /// Child stream for a sub-task; deterministic in (this stream's next draw, tag).
    RandomStream fork(std::uint64_t tag) { return RandomStream(engine_(), tag); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sbreak
