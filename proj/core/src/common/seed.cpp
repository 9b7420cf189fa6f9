#include "pbds/common/seed.hpp"

#include "pbds/common/error.hpp"

namespace pbds {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
  // FNV-1a over the label, then mixed with the parent
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(parent ^ splitmix64(h));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) fail(ErrorKind::invalid_argument, "uniform_index over an empty range");
  // rejection sampling on the largest multiple of n
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t x = rng();
  while (x > limit) x = rng();
  return x % n;
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11U) * 0x1.0p-53; }

}  // namespace pbds
