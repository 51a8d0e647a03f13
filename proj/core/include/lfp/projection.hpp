#pragma once

#include <span>
#include <variant>
#include <vector>

namespace lfp {

struct SimplexTarget {
  std::size_t dim = 0;
};

struct BoxTarget {
  std::vector<double> lo, hi;
};

struct BallTarget {
  std::vector<double> center;
  double radius = 0.0;
};

using PrimitiveTarget = std::variant<SimplexTarget, BoxTarget, BallTarget>;

/// Euclidean projection onto the probability simplex by sort-and-threshold,
/// O(d log d). The output is renormalized once so the entries sum to 1
/// exactly up to one rounding.
std::vector<double> project_simplex(std::span<const double> v);
void project_simplex_inplace(std::span<double> v);

/// Coordinatewise clamp onto [lo, hi].
std::vector<double> project_box(std::span<const double> v,
                                std::span<const double> lo,
                                std::span<const double> hi);
void project_box_inplace(std::span<double> v, std::span<const double> lo,
                         std::span<const double> hi);

/// Radial projection onto the closed ball B_center(radius).
std::vector<double> project_ball(std::span<const double> v,
                                 std::span<const double> center, double radius);

std::vector<double> project(const PrimitiveTarget& target,
                            std::span<const double> v);

/// Euclidean distance from v to the target set (0 when inside).
double distance_to(const PrimitiveTarget& target, std::span<const double> v);

struct AlternatingResult {
  std::vector<double> point;
  bool converged = false;
  int iterations = 0;  // full sweeps over the target list
};

/// Cyclic alternating projections onto an intersection of convex targets.
/// Stops as soon as the iterate is within tol of every target, when a sweep
/// moves the iterate by less than tol, or at max_iter sweeps (flagged
/// non-converged). With a single target this is the exact projection.
AlternatingResult project_alternating(std::span<const double> v,
                                      std::span<const PrimitiveTarget> targets,
                                      int max_iter = 10000, double tol = 1e-12);

/// Intersection target with a feasibility witness: construction runs the
/// alternating method from the first part's center and throws
/// std::invalid_argument if it fails to reach the intersection.
class IntersectionTarget {
public:
  explicit IntersectionTarget(std::vector<PrimitiveTarget> parts,
                              int max_iter = 10000, double tol = 1e-12);

  const std::vector<PrimitiveTarget>& parts() const { return parts_; }
  const std::vector<double>& witness() const { return witness_; }

  AlternatingResult project(std::span<const double> v) const;

private:
  std::vector<PrimitiveTarget> parts_;
  std::vector<double> witness_;
  int max_iter_;
  double tol_;
};

}  // namespace lfp
