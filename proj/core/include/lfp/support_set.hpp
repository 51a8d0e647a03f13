#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lfp/projection.hpp"

namespace lfp {

/// Feasible input region Omega: a box, a ball, or their intersection.
/// Degenerate boxes (lo == hi in some coordinate) are allowed so that
/// single-point feasible sets can be expressed.
class SupportSet {
public:
  static SupportSet box(std::vector<double> lo, std::vector<double> hi);
  static SupportSet ball(std::vector<double> center, double radius);
  static SupportSet box_ball(std::vector<double> lo, std::vector<double> hi,
                             std::vector<double> center, double radius);

  int dim() const { return dim_; }
  bool has_box() const { return box_.has_value(); }
  bool has_ball() const { return ball_.has_value(); }
  const BoxTarget& box_part() const { return *box_; }
  const BallTarget& ball_part() const { return *ball_; }

  bool contains(std::span<const double> x, double tol = 0.0) const;

  /// Euclidean projection onto Omega: exact clamp/radial projection for a
  /// single primitive, alternating projections for the intersection.
  std::vector<double> project(std::span<const double> x) const;

  /// Diameter of Omega (an upper bound for the intersection case); drives
  /// default step sizes and merge radii.
  double diameter() const;

  std::vector<double> center() const;

  /// Smallest axis-aligned box containing Omega.
  BoxTarget bounding_box() const;

  bool is_compact() const;

private:
  SupportSet() = default;
  int dim_ = 0;
  std::optional<BoxTarget> box_;
  std::optional<BallTarget> ball_;
};

}  // namespace lfp
