#pragma once

#include <cstdint>

namespace lfp::detail {

// SplitMix64. The solver promises bit-for-bit reproducibility for a given
// seed; std::uniform_real_distribution is implementation-defined, so the
// generator and the uniform mapping are pinned here.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // For shuffles of small index ranges; modulo bias is irrelevant there.
  std::uint64_t below(std::uint64_t n) noexcept { return next() % n; }

private:
  std::uint64_t state_;
};

// Decorrelated per-stream seed (restart index, sweep cell, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  SplitMix64 g(base ^ (0xA0761D6478BD642Full * (stream + 1)));
  g.next();
  return g.next();
}

}  // namespace lfp::detail
