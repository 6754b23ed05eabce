#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace netlqr::rng {

/// splitmix64 step; used to whiten seeds and derive independent streams.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministically derive the seed for sub-stream `index` of `master`.
/// Streams for distinct indices are independent, so work items seeded this
/// way can run in any order (or concurrently) with identical results.
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index);

/// Deterministic random source. Distributions are implemented by hand on top
/// of std::mt19937_64 so the byte stream does not depend on the standard
/// library's distribution internals.
class Generator {
public:
    explicit Generator(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform double in [0, 1).
    double uniform();

    /// Uniform integer in [0, bound). bound must be positive.
    int uniform_int(int bound);

    /// Standard normal via Box-Muller.
    double normal();

    /// Uniform k-subset of {0,...,population-1} via a Fisher-Yates prefix,
    /// returned sorted ascending.
    std::vector<int> sample_without_replacement(int population, int k);

private:
    std::mt19937_64 engine_;
};

}  // namespace netlqr::rng
