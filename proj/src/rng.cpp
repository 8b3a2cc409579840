#include "stratlearn/rng.hpp"

#include <cassert>
#include <limits>

namespace stratlearn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t salt) {
  return splitmix64(splitmix64(seed ^ fnv1a(label)) + salt);
}

std::size_t uniform_index(Rng &rng, std::size_t n) {
  assert(n > 0);
  const std::uint64_t range = n;
  // Reject the partial bucket at the top so every index is equally likely.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double uniform_unit(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace stratlearn
