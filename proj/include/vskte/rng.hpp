#pragma once

#include <cstdint>
#include <random>

namespace vskte {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Stable per-stream seed: splitmix64 applied to master + golden-ratio step * (stream + 1).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace vskte
