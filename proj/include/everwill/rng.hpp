#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace everwill {

/// Seeded random source with a platform-independent uniform variate.
///
/// std::uniform_real_distribution is implementation-defined, so uniform()
/// is built directly from the 64-bit Mersenne Twister output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform variate in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// 64-bit FNV-1a hash; stable across platforms and compilers.
constexpr std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the independent stream for `role` under a run seed:
/// splitmix64(run_seed XOR fnv1a64(role)).
constexpr std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view role) {
    return splitmix64(run_seed ^ fnv1a64(role));
}

inline Rng make_stream(std::uint64_t run_seed, std::string_view role) {
    return Rng(derive_stream_seed(run_seed, role));
}

}  // namespace everwill

namespace everwill {

/// Independent streams for one history: the engine's lotteries and the will strategy.
struct RunStreams {
    Rng lottery;
    Rng strategy;

    static RunStreams from_seed(std::uint64_t run_seed) {
        return {make_stream(run_seed, "engine-lottery"), make_stream(run_seed, "will-strategy")};
    }
};

}  // namespace everwill
