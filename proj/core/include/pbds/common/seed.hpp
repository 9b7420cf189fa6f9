#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pbds {

/// Derives an independent child seed from a parent seed and a label.
/// All randomness in the library flows from one root seed through this function.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform index in [0, n). Avoids std::uniform_int_distribution so streams are
/// identical across standard library implementations.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform real in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

}  // namespace pbds
