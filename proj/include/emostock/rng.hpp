#pragma once

#include <cstdint>
#include <vector>

namespace emostock {

// SplitMix64: the project's single PRNG. Deterministic across platforms and
// standard-library versions, which std::shuffle / std::*_distribution are not.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform double in [0, 1), 53-bit resolution
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // uniform double in [lo, hi)
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // uniform integer in [0, n), n > 0 (Lemire's multiply-shift)
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // standard normal via Box-Muller (one value per call, no caching)
  double next_gaussian();

 private:
  std::uint64_t state_;
};

// Mixes independent stream identifiers into one seed (e.g. run/epoch/batch).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

// In-place Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace emostock
