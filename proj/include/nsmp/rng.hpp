#ifndef NSMP_RNG_HPP
#define NSMP_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include "nsmp/oracle.hpp"

namespace nsmp {

/// FNV-1a, stable across platforms (std::hash is not).
std::uint64_t label_hash(std::string_view label);

/// Engine seeded from (seed, label) so every call site draws its own stream.
std::mt19937_64 split_rng(std::uint64_t seed, std::string_view label);

/// Uniform sample from the Euclidean ball of the given radius around center.
Vector uniform_in_ball(std::mt19937_64& rng, const Vector& center, double radius);

/// Uniform unit vector in R^dim.
Vector uniform_direction(std::mt19937_64& rng, int dim);

}  // namespace nsmp

#endif
