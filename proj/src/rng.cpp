#include "ftt/rng.hpp"

namespace ftt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::uint64_t counter) {
  std::uint64_t s = splitmix64(base ^ fnv1a64(label));
  return splitmix64(s ^ (counter * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
}

}  // namespace ftt
