#pragma once

// Deterministic randomness. All sampling in this library draws from
// mt19937_64 engines through the helpers below instead of the standard
// <random> distributions, whose output is implementation-defined. Streams
// are split by hashing (master seed, tag, index) with SplitMix64, so a
// record's randomness depends only on its index, never on execution order.

#include <cstdint>
#include <random>
#include <vector>

namespace omegalab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of substream `index` of the stream identified by `master`.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Two-level split: (master, tag) names a family, index selects a member.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t index) {
  return substream_seed(substream_seed(master, tag), index);
}

// Substream tags used across the library. Values are part of the
// reproducibility contract: changing them changes every sampled dataset.
namespace seeds {
inline constexpr std::uint64_t kParamsInit = 1;
inline constexpr std::uint64_t kTrainBatch = 2;
inline constexpr std::uint64_t kValidationSet = 3;
inline constexpr std::uint64_t kRangeEval = 4;
inline constexpr std::uint64_t kCandidate = 5;
inline constexpr std::uint64_t kShuffle = 6;
}  // namespace seeds

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Unbiased draw from [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Inclusive integer range.
  int range_int(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(xs[i - 1], xs[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace omegalab
