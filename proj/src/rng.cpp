#include "hspa/rng.hpp"

#include <cmath>
#include <numbers>

namespace hspa {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
__extension__ using uint128 = unsigned __int128;

std::uint64_t finalize(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace

std::uint64_t Rng::mix(std::uint64_t x)
{
    return finalize(x + kGolden);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(seed ^ mix(stream + 1)))
{
}

std::uint64_t Rng::next_u64()
{
    state_ += kGolden;
    return finalize(state_);
}

double Rng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::bounded(std::uint64_t n)
{
    const auto wide = static_cast<uint128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
}

double Rng::normal()
{
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

} // namespace hspa
