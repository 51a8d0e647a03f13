#pragma once

#include <span>
#include <string>
#include <vector>

#include "lfp/support_set.hpp"

namespace lfp {

/// Finitely supported prior on Omega: d locations in R^n with probability
/// masses on the simplex. This is the mass/location parameterization the
/// solver optimizes over.
struct DiscreteDistribution {
  std::vector<std::vector<double>> points;
  std::vector<double> masses;

  int size() const { return static_cast<int>(points.size()); }
  int dim() const {
    return points.empty() ? 0 : static_cast<int>(points.front().size());
  }

  /// Mass-weighted mean of the support points.
  std::vector<double> mean() const;
};

struct ValidationReport {
  bool ok = true;
  std::string violation;  // names the first violated invariant; empty when ok
  int index = -1;         // offending atom index, -1 for aggregate checks
};

/// Checks the distribution invariants: matching lengths with d >= 1,
/// nonnegative masses, total mass 1 within 1e-12, and every point inside the
/// support set. Violations are reported, never thrown.
ValidationReport validate(const DiscreteDistribution& dist,
                          const SupportSet& support);

/// Coalesces atoms within merge_radius of each other into mass-weighted
/// centroids, drops atoms with mass below prune_threshold, and renormalizes.
/// With radius 0 and threshold 0 this is the identity. The caller must
/// re-evaluate any risk computed from the input. Throws std::runtime_error
/// when every atom is pruned.
DiscreteDistribution merge_and_prune(const DiscreteDistribution& dist,
                                     double merge_radius,
                                     double prune_threshold);

/// Point reflection through `center`: x -> 2*center - x, masses unchanged.
DiscreteDistribution reflect(const DiscreteDistribution& dist,
                             std::span<const double> center);

}  // namespace lfp
