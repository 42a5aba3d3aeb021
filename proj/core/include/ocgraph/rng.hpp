#pragma once
#include <cstdint>
#include <random>
#include <vector>

namespace ocgraph {

// All randomness flows through this wrapper so that a run is reproducible from
// one integer seed. mt19937_64 has a standard-mandated sequence and the
// uniform mapping below avoids std::uniform_real_distribution, whose output is
// implementation-defined; together they keep trajectories stable across
// toolchains, not just across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

  // In-place Fisher-Yates; stable across platforms unlike std::shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

// SplitMix64 finalizer; decorrelates nearby seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives an independent stream from a base seed and a stream tag, so that
// e.g. layer-3 init draws do not shift when layer 2 grows an extra matrix.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(base ^ mix_seed(stream));
}

// Fixed stream tags for the independent consumers of one user-visible seed.
namespace seed_stream {
inline constexpr std::uint64_t kSplit = 0x5eed0001;
inline constexpr std::uint64_t kGlorot = 0x5eed0002;   // + per-matrix offset
inline constexpr std::uint64_t kDropout = 0x5eed0003;  // + epoch offset
}  // namespace seed_stream

}  // namespace ocgraph
