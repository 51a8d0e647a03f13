#include "lfp/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lfp/detail/accumulate.hpp"

namespace lfp {

void project_simplex_inplace(std::span<double> v) {
  const std::size_t d = v.size();
  if (d == 0) throw std::invalid_argument("project_simplex: empty vector");

  // Sort descending, find the largest k with u_(k) - (sum_{i<=k} u_(i) - 1)/k > 0,
  // then shift by that threshold and clip.
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());

  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    cumsum += u[k];
    const double cand = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - cand > 0.0) tau = cand;
  }

  detail::KahanSum total;
  for (double& x : v) {
    x = std::max(x - tau, 0.0);
    total.add(x);
  }
  // One renormalization kills the accumulated round-off in the sum.
  const double s = total.value();
  if (s > 0.0) {
    for (double& x : v) x /= s;
  } else {
    for (double& x : v) x = 1.0 / static_cast<double>(d);
  }
}

std::vector<double> project_simplex(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  project_simplex_inplace(out);
  return out;
}

void project_box_inplace(std::span<double> v, std::span<const double> lo,
                         std::span<const double> hi) {
  for (std::size_t l = 0; l < v.size(); ++l) {
    v[l] = std::clamp(v[l], lo[l], hi[l]);
  }
}

std::vector<double> project_box(std::span<const double> v,
                                std::span<const double> lo,
                                std::span<const double> hi) {
  std::vector<double> out(v.begin(), v.end());
  project_box_inplace(out, lo, hi);
  return out;
}

std::vector<double> project_ball(std::span<const double> v,
                                 std::span<const double> center,
                                 double radius) {
  double dist2 = 0.0;
  for (std::size_t l = 0; l < v.size(); ++l) {
    const double t = v[l] - center[l];
    dist2 += t * t;
  }
  std::vector<double> out(v.begin(), v.end());
  const double dist = std::sqrt(dist2);
  if (dist > radius) {
    const double scale = radius / dist;
    for (std::size_t l = 0; l < out.size(); ++l) {
      out[l] = center[l] + scale * (out[l] - center[l]);
    }
  }
  return out;
}

std::vector<double> project(const PrimitiveTarget& target,
                            std::span<const double> v) {
  return std::visit(
      [&](const auto& t) -> std::vector<double> {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, SimplexTarget>) {
          return project_simplex(v);
        } else if constexpr (std::is_same_v<T, BoxTarget>) {
          return project_box(v, t.lo, t.hi);
        } else {
          return project_ball(v, t.center, t.radius);
        }
      },
      target);
}

double distance_to(const PrimitiveTarget& target, std::span<const double> v) {
  const std::vector<double> p = project(target, v);
  double dist2 = 0.0;
  for (std::size_t l = 0; l < v.size(); ++l) {
    const double t = v[l] - p[l];
    dist2 += t * t;
  }
  return std::sqrt(dist2);
}

AlternatingResult project_alternating(std::span<const double> v,
                                      std::span<const PrimitiveTarget> targets,
                                      int max_iter, double tol) {
  AlternatingResult res;
  res.point.assign(v.begin(), v.end());
  if (targets.empty()) {
    res.converged = true;
    return res;
  }

  auto feasible = [&]() {
    for (const auto& t : targets) {
      if (distance_to(t, res.point) > tol) return false;
    }
    return true;
  };

  std::vector<double> prev;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    prev = res.point;
    for (const auto& t : targets) {
      res.point = project(t, res.point);
    }
    res.iterations = sweep;
    if (feasible()) {
      res.converged = true;
      return res;
    }
    double move = 0.0;
    for (std::size_t l = 0; l < prev.size(); ++l) {
      move = std::max(move, std::abs(res.point[l] - prev[l]));
    }
    if (move < tol) {
      // Stalled: the iterate sits on one set but not within tol of all of
      // them (empty or ill-conditioned intersection).
      res.converged = feasible();
      return res;
    }
  }
  res.converged = false;
  return res;
}

IntersectionTarget::IntersectionTarget(std::vector<PrimitiveTarget> parts,
                                       int max_iter, double tol)
    : parts_(std::move(parts)), max_iter_(max_iter), tol_(tol) {
  if (parts_.empty()) {
    throw std::invalid_argument("IntersectionTarget: no parts");
  }
  std::vector<double> start = std::visit(
      [](const auto& t) -> std::vector<double> {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, SimplexTarget>) {
          return std::vector<double>(t.dim, 1.0 / static_cast<double>(t.dim));
        } else if constexpr (std::is_same_v<T, BoxTarget>) {
          std::vector<double> c(t.lo.size());
          for (std::size_t l = 0; l < c.size(); ++l) c[l] = 0.5 * (t.lo[l] + t.hi[l]);
          return c;
        } else {
          return t.center;
        }
      },
      parts_.front());
  const AlternatingResult w = project_alternating(start, parts_, max_iter_, tol_);
  if (!w.converged) {
    throw std::invalid_argument(
        "IntersectionTarget: no feasibility witness (alternating projections "
        "did not converge from the center point)");
  }
  witness_ = w.point;
}

AlternatingResult IntersectionTarget::project(std::span<const double> v) const {
  return project_alternating(v, parts_, max_iter_, tol_);
}

}  // namespace lfp
