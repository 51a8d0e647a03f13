#include "lfp/support_set.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lfp {
namespace {

void check_box(const std::vector<double>& lo, const std::vector<double>& hi) {
  if (lo.empty() || lo.size() != hi.size()) {
    throw std::invalid_argument("SupportSet: box bounds must be nonempty and of equal length");
  }
  for (std::size_t l = 0; l < lo.size(); ++l) {
    if (!(lo[l] <= hi[l])) {
      throw std::invalid_argument("SupportSet: box requires lo <= hi in every coordinate");
    }
  }
}

void check_ball(const std::vector<double>& center, double radius) {
  if (center.empty()) throw std::invalid_argument("SupportSet: ball center must be nonempty");
  if (!(radius > 0.0)) throw std::invalid_argument("SupportSet: ball radius must be positive");
}

}  // namespace

SupportSet SupportSet::box(std::vector<double> lo, std::vector<double> hi) {
  check_box(lo, hi);
  SupportSet s;
  s.dim_ = static_cast<int>(lo.size());
  s.box_ = BoxTarget{std::move(lo), std::move(hi)};
  return s;
}

SupportSet SupportSet::ball(std::vector<double> center, double radius) {
  check_ball(center, radius);
  SupportSet s;
  s.dim_ = static_cast<int>(center.size());
  s.ball_ = BallTarget{std::move(center), radius};
  return s;
}

SupportSet SupportSet::box_ball(std::vector<double> lo, std::vector<double> hi,
                                std::vector<double> center, double radius) {
  check_box(lo, hi);
  check_ball(center, radius);
  if (lo.size() != center.size()) {
    throw std::invalid_argument("SupportSet: box and ball dimensions differ");
  }
  SupportSet s;
  s.dim_ = static_cast<int>(lo.size());
  s.box_ = BoxTarget{std::move(lo), std::move(hi)};
  s.ball_ = BallTarget{std::move(center), radius};
  // Feasibility witness for the intersection.
  IntersectionTarget check({*s.box_, *s.ball_});
  return s;
}

bool SupportSet::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != dim_) return false;
  if (box_) {
    for (int l = 0; l < dim_; ++l) {
      if (x[l] < box_->lo[l] - tol || x[l] > box_->hi[l] + tol) return false;
    }
  }
  if (ball_) {
    double dist2 = 0.0;
    for (int l = 0; l < dim_; ++l) {
      const double t = x[l] - ball_->center[l];
      dist2 += t * t;
    }
    if (std::sqrt(dist2) > ball_->radius + tol) return false;
  }
  return true;
}

std::vector<double> SupportSet::project(std::span<const double> x) const {
  if (box_ && ball_) {
    const PrimitiveTarget parts[2] = {*box_, *ball_};
    return project_alternating(x, parts).point;
  }
  if (box_) return project_box(x, box_->lo, box_->hi);
  return project_ball(x, ball_->center, ball_->radius);
}

double SupportSet::diameter() const {
  double d = std::numeric_limits<double>::infinity();
  if (box_) {
    double s = 0.0;
    for (int l = 0; l < dim_; ++l) {
      const double w = box_->hi[l] - box_->lo[l];
      s += w * w;
    }
    d = std::min(d, std::sqrt(s));
  }
  if (ball_) d = std::min(d, 2.0 * ball_->radius);
  return d;
}

std::vector<double> SupportSet::center() const {
  if (box_) {
    std::vector<double> c(dim_);
    for (int l = 0; l < dim_; ++l) c[l] = 0.5 * (box_->lo[l] + box_->hi[l]);
    if (ball_) return project(c);
    return c;
  }
  return ball_->center;
}

BoxTarget SupportSet::bounding_box() const {
  if (box_ && ball_) {
    BoxTarget b;
    b.lo.resize(dim_);
    b.hi.resize(dim_);
    for (int l = 0; l < dim_; ++l) {
      b.lo[l] = std::max(box_->lo[l], ball_->center[l] - ball_->radius);
      b.hi[l] = std::min(box_->hi[l], ball_->center[l] + ball_->radius);
    }
    return b;
  }
  if (box_) return *box_;
  BoxTarget b;
  b.lo.resize(dim_);
  b.hi.resize(dim_);
  for (int l = 0; l < dim_; ++l) {
    b.lo[l] = ball_->center[l] - ball_->radius;
    b.hi[l] = ball_->center[l] + ball_->radius;
  }
  return b;
}

bool SupportSet::is_compact() const {
  if (ball_) return true;
  for (int l = 0; l < dim_; ++l) {
    if (!std::isfinite(box_->lo[l]) || !std::isfinite(box_->hi[l])) return false;
  }
  return true;
}

}  // namespace lfp
