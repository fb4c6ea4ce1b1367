#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace idrl {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for one named random stream. Every random draw in an experiment is
/// keyed by (master seed, seed index, iteration, stream tag) so that results do
/// not depend on scheduling or on which other streams were consumed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t seed, std::uint64_t iteration,
                          std::string_view tag);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

double standard_normal(Rng& rng);
double uniform01(Rng& rng);
/// Unbiased draw from {0, ..., n-1}; n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace idrl
