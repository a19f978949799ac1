#pragma once

// Seeded noise streams. Every stochastic component owns its own stream,
// derived from (master_seed, component label), so changing one component's
// parameters never perturbs another component's draws.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace syncsim {

// Stable 64-bit seed for a named sub-stream of a master seed.
std::uint64_t sub_seed(std::uint64_t master_seed, std::string_view label);

// Deterministic noise source. Distribution transforms are implemented here
// (not via std::*_distribution) so the draw sequence is fixed by the seed
// alone, independent of the standard library.
class NoiseStream {
public:
    NoiseStream() : NoiseStream(0) {}
    explicit NoiseStream(std::uint64_t seed) : engine_(seed) {}
    NoiseStream(std::uint64_t master_seed, std::string_view label)
        : engine_(sub_seed(master_seed, label)) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, max).
    double uniform_under(double max) { return uniform() * max; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; consumes exactly two engine draws.
    double normal() {
        double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238 * u2);
    }

    double normal(double sigma) { return sigma == 0.0 ? 0.0 : normal() * sigma; }

private:
    std::mt19937_64 engine_;
};

} // namespace syncsim
