#pragma once

#include <cmath>
#include <span>

namespace lfp::detail {

// Neumaier-compensated accumulator. Risk and posterior identities are
// specified to 1e-12 at up to ~1e4 terms, which plain left-to-right
// summation does not reliably meet.
class KahanSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

  void reset() noexcept {
    sum_ = 0.0;
    comp_ = 0.0;
  }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  KahanSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace lfp::detail
