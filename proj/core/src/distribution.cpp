#include "lfp/distribution.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lfp/detail/accumulate.hpp"

namespace lfp {

std::vector<double> DiscreteDistribution::mean() const {
  std::vector<double> m(dim(), 0.0);
  for (int l = 0; l < dim(); ++l) {
    detail::KahanSum acc;
    for (int i = 0; i < size(); ++i) acc.add(masses[i] * points[i][l]);
    m[l] = acc.value();
  }
  return m;
}

ValidationReport validate(const DiscreteDistribution& dist,
                          const SupportSet& support) {
  auto fail = [](std::string msg, int idx) {
    return ValidationReport{false, std::move(msg), idx};
  };

  if (dist.points.empty() || dist.points.size() != dist.masses.size()) {
    return fail("points and masses must have equal length d >= 1", -1);
  }
  for (int i = 0; i < dist.size(); ++i) {
    if (static_cast<int>(dist.points[i].size()) != support.dim()) {
      return fail("point dimension does not match the support set", i);
    }
  }
  for (int i = 0; i < dist.size(); ++i) {
    if (!(dist.masses[i] >= 0.0)) {
      return fail("negative mass", i);
    }
  }
  detail::KahanSum total;
  for (double p : dist.masses) total.add(p);
  const double s = total.value();
  if (std::abs(s - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "masses sum to " << s << ", expected 1 within 1e-12";
    return fail(os.str(), -1);
  }
  for (int i = 0; i < dist.size(); ++i) {
    if (!support.contains(dist.points[i])) {
      return fail("point outside the support set", i);
    }
  }
  return {};
}

DiscreteDistribution merge_and_prune(const DiscreteDistribution& dist,
                                     double merge_radius,
                                     double prune_threshold) {
  if (merge_radius < 0.0 || prune_threshold < 0.0) {
    throw std::invalid_argument("merge_and_prune: radius and threshold must be nonnegative");
  }
  const int d = dist.size();
  const int n = dist.dim();

  // Union-find over atom pairs within the merge radius. radius == 0 merges
  // nothing, which keeps (0, 0) an exact identity even on duplicate atoms.
  std::vector<int> parent(d);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  if (merge_radius > 0.0) {
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        double dist2 = 0.0;
        for (int l = 0; l < n; ++l) {
          const double t = dist.points[i][l] - dist.points[j][l];
          dist2 += t * t;
        }
        if (std::sqrt(dist2) <= merge_radius) {
          const int ri = find(i), rj = find(j);
          if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
        }
      }
    }
  }

  // Collapse clusters to mass-weighted centroids (preserves the prior mean),
  // in first-occurrence order for determinism.
  std::vector<int> order;
  std::vector<int> slot(d, -1);
  std::vector<double> cluster_mass;
  std::vector<std::vector<double>> centroid;
  std::vector<std::vector<double>> plain_mean;  // fallback for zero-mass clusters
  std::vector<int> count;
  for (int i = 0; i < d; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(order.size());
      order.push_back(r);
      cluster_mass.push_back(0.0);
      centroid.emplace_back(n, 0.0);
      plain_mean.emplace_back(n, 0.0);
      count.push_back(0);
    }
    const int s = slot[r];
    cluster_mass[s] += dist.masses[i];
    for (int l = 0; l < n; ++l) {
      centroid[s][l] += dist.masses[i] * dist.points[i][l];
      plain_mean[s][l] += dist.points[i][l];
    }
    count[s] += 1;
  }

  bool changed = static_cast<int>(order.size()) != d;
  DiscreteDistribution out;
  for (std::size_t s = 0; s < order.size(); ++s) {
    if (cluster_mass[s] < prune_threshold) {
      changed = true;
      continue;
    }
    std::vector<double> x(n);
    for (int l = 0; l < n; ++l) {
      x[l] = cluster_mass[s] > 0.0 ? centroid[s][l] / cluster_mass[s]
                                   : plain_mean[s][l] / count[s];
    }
    out.points.push_back(std::move(x));
    out.masses.push_back(cluster_mass[s]);
  }
  if (out.points.empty()) {
    throw std::runtime_error("merge_and_prune: empty distribution (all atoms pruned)");
  }

  if (changed) {
    detail::KahanSum total;
    for (double p : out.masses) total.add(p);
    const double s = total.value();
    for (double& p : out.masses) p /= s;
  }
  return out;
}

DiscreteDistribution reflect(const DiscreteDistribution& dist,
                             std::span<const double> center) {
  if (static_cast<int>(center.size()) != dist.dim()) {
    throw std::invalid_argument("reflect: center dimension mismatch");
  }
  DiscreteDistribution out = dist;
  for (auto& x : out.points) {
    for (std::size_t l = 0; l < x.size(); ++l) x[l] = 2.0 * center[l] - x[l];
  }
  return out;
}

}  // namespace lfp
