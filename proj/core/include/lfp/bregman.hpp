#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lfp {

/// Loss induced by a continuously differentiable, strictly convex generator
/// phi: l(u, v) = phi(u) - phi(v) - <u - v, grad phi(v)>. The generic
/// evaluation below is the single source of truth; closed forms exist only as
/// cross-check oracles in the tests.
struct BregmanLoss {
  std::function<double(std::span<const double>)> phi;
  std::function<void(std::span<const double>, std::span<double>)> grad_phi;
  std::function<bool(std::span<const double>)> in_domain;
  std::string domain_note;
  /// True only for scalar squared error; gates the analytic gradient path.
  bool has_analytic_gradient_support = false;
  int dim = 1;
};

/// Generic Bregman evaluation. Throws std::domain_error when u or v leaves
/// the generator domain; clamping is never attempted, since a silently
/// clamped loss would corrupt risk maximization.
double bregman_loss(const BregmanLoss& loss, std::span<const double> u,
                    std::span<const double> v);

/// phi(u) = |u|^2 on R^n; l(u, v) = |u - v|^2.
BregmanLoss squared_error_loss(int n);

/// phi(u) = u1 log u1 + u2 log u2 on the open positive orthant of R^2
/// (generalized I-divergence).
BregmanLoss generalized_i_divergence();

namespace detail {

// Hoists phi(v) and grad phi(v) so risk sums can evaluate l(x_i, v) for many
// x_i without re-deriving the v side.
class BregmanEval {
public:
  explicit BregmanEval(const BregmanLoss& loss)
      : loss_(&loss), grad_v_(loss.dim) {}

  void set_v(std::span<const double> v);

  // l(u, v) given a cached phi(u); u must already be domain-checked.
  double operator()(std::span<const double> u, double phi_u) const {
    double ip = 0.0;
    for (int l = 0; l < loss_->dim; ++l) ip += (u[l] - v_[l]) * grad_v_[l];
    return phi_u - phi_v_ - ip;
  }

private:
  const BregmanLoss* loss_;
  std::vector<double> grad_v_;
  std::vector<double> v_;
  double phi_v_ = 0.0;
};

}  // namespace detail

}  // namespace lfp
