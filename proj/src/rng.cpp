#include "emostock/rng.hpp"

#include <cmath>

namespace emostock {

double SplitMix64::next_gaussian() {
  // Box-Muller; u1 nudged away from zero so log() stays finite.
  double u1 = next_double();
  double u2 = next_double();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  SplitMix64 g(a);
  std::uint64_t s = g.next() ^ (b + 0x9e3779b97f4a7c15ULL);
  SplitMix64 h(s);
  return h.next() ^ (c * 0xbf58476d1ce4e5b9ULL + 1);
}

}  // namespace emostock
