#include "netlqr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace netlqr::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master;
    std::uint64_t a = splitmix64(state);
    state = a ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(state);
}

Generator::Generator(std::uint64_t seed) {
    // Whiten the seed before feeding the engine so that nearby seeds give
    // unrelated streams.
    std::uint64_t state = seed;
    engine_.seed(splitmix64(state));
}

std::uint64_t Generator::next() { return engine_(); }

double Generator::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Generator::uniform_int(int bound) {
    if (bound <= 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t b = static_cast<std::uint64_t>(bound);
    // Rejection sampling for an unbiased draw.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<int>(x % b);
}

double Generator::normal() {
    // Box-Muller; the sine branch is discarded to keep the stream a pure
    // function of the uniform draw count.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<int> Generator::sample_without_replacement(int population, int k) {
    if (k < 0 || k > population) {
        throw std::invalid_argument("sample_without_replacement: k out of range");
    }
    std::vector<int> pool(population);
    for (int i = 0; i < population; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + uniform_int(population - i);
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> chosen(pool.begin(), pool.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace netlqr::rng
