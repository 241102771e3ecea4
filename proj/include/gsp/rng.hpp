#pragma once

#include <cstdint>
#include <random>

namespace gsp {

// Stateless 64-bit mixer used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based seed derivation: trial t of an experiment draws from an
// engine seeded with mix_seed(seed, t), so trials are reproducible in any
// evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xA0761D6478BD642Full + 0x8EBC6AF09C88C6E3ull));
}

// Deterministic uniform generator. mt19937_64 has a fixed cross-platform
// sequence; doubles are produced directly from the high bits so results do
// not depend on std::uniform_real_distribution implementation details.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform on the open interval (0,1); never returns an exact endpoint.
    double uniform() {
        return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 eng_;
};

// Standard normal CDF.
double normal_cdf(double z);

// Standard normal quantile, accurate to close to machine precision.
// Requires p in (0,1).
double normal_quantile(double p);

}  // namespace gsp
