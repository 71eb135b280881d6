#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace imbgan {

using Rng = std::mt19937_64;

// Sub-seed for a named pipeline stage: splitmix64(master ^ fnv1a64(stage)).
// Stable across runs and platforms.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage);

}  // namespace imbgan
