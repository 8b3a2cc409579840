#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace stratlearn {

/// Generator used by every randomized component. The engine only relies on
/// the raw 64-bit output stream, never on std distributions, so runs are
/// reproducible across standard library implementations.
using Rng = std::mt19937_64;

/// Derive an independent seed for a labeled sub-stream, e.g.
/// derive_seed(seed, "tree", b) for the b-th tree of a forest.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t salt = 0);

inline Rng make_rng(std::uint64_t seed, std::string_view label,
                    std::uint64_t salt = 0) {
  return Rng(derive_seed(seed, label, salt));
}

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng &rng, std::size_t n);

/// Uniform real in [0, 1) with 53 bits of precision.
double uniform_unit(Rng &rng);

} // namespace stratlearn
