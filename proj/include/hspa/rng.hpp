#pragma once

#include <cstddef>
#include <cstdint>

namespace hspa {

// SplitMix64 generator shared by every stochastic routine in the library.
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Independent streams are derived from a master seed with
//   state0 = mix(seed ^ mix(stream + 1))
// where mix() is the output function above applied to (x + 0x9E3779B97F4A7C15).
// Uniform doubles take the top 53 bits; normal variates use Box-Muller with the
// sine branch cached for the next call.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    // [0, 1)
    double uniform();

    // Unbiased-enough bounded integer in [0, n): (next_u64() * n) >> 64.
    std::uint64_t bounded(std::uint64_t n);

    double normal();

    static std::uint64_t mix(std::uint64_t x);

private:
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace hspa
