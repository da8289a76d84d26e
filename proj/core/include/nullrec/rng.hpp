#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace nullrec {

/// Identifies one reproducible random stream. Distinct (master_seed, stream_id)
/// pairs yield statistically independent streams, and the stream is a pure
/// function of the pair, independent of scheduling or thread count.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    bool operator==(const SeedSpec&) const = default;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Stream of standard normal deviates keyed by (seed, channel).
/// Channels split one SeedSpec into independent sub-streams (e.g. the two
/// driving noises of a coupled simulation).
class GaussianStream {
public:
    explicit GaussianStream(SeedSpec seed, std::uint64_t channel = 0) {
        std::uint64_t s = seed.master_seed;
        // Fold stream and channel into the splitmix state before expansion so
        // that nearby ids map to unrelated engine seeds.
        s ^= detail::splitmix64(seed.stream_id) + 0x632be59bd9b4e019ULL;
        std::uint64_t c = channel;
        s ^= detail::splitmix64(c) * 0x9e3779b97f4a7c15ULL;
        std::uint32_t words[8];
        for (auto& w : words) w = static_cast<std::uint32_t>(detail::splitmix64(s) >> 16);
        std::seed_seq seq(words, words + 8);
        engine_.seed(seq);
    }

    double next() { return normal_(engine_); }

    void fill(std::span<double> out) {
        for (auto& x : out) x = normal_(engine_);
    }

    std::uint64_t next_uint() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nullrec
