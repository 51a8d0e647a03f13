#include "lfp/bregman.hpp"

#include <cmath>
#include <stdexcept>

namespace lfp {
namespace {

void check_domain(const BregmanLoss& loss, std::span<const double> u,
                  const char* which) {
  if (static_cast<int>(u.size()) != loss.dim) {
    throw std::invalid_argument("bregman_loss: argument dimension mismatch");
  }
  if (loss.in_domain && !loss.in_domain(u)) {
    throw std::domain_error(std::string("bregman_loss: ") + which +
                            " outside generator domain (" + loss.domain_note + ")");
  }
}

}  // namespace

double bregman_loss(const BregmanLoss& loss, std::span<const double> u,
                    std::span<const double> v) {
  check_domain(loss, u, "u");
  check_domain(loss, v, "v");
  std::vector<double> grad_v(loss.dim);
  loss.grad_phi(v, grad_v);
  double ip = 0.0;
  for (int l = 0; l < loss.dim; ++l) ip += (u[l] - v[l]) * grad_v[l];
  return loss.phi(u) - loss.phi(v) - ip;
}

BregmanLoss squared_error_loss(int n) {
  if (n < 1) throw std::invalid_argument("squared_error_loss: n must be >= 1");
  BregmanLoss loss;
  loss.dim = n;
  loss.domain_note = "R^n";
  loss.has_analytic_gradient_support = (n == 1);
  loss.phi = [](std::span<const double> u) {
    double s = 0.0;
    for (double x : u) s += x * x;
    return s;
  };
  loss.grad_phi = [](std::span<const double> u, std::span<double> out) {
    for (std::size_t l = 0; l < u.size(); ++l) out[l] = 2.0 * u[l];
  };
  loss.in_domain = nullptr;  // all of R^n
  return loss;
}

BregmanLoss generalized_i_divergence() {
  BregmanLoss loss;
  loss.dim = 2;
  loss.domain_note = "open positive orthant of R^2";
  loss.has_analytic_gradient_support = false;
  loss.phi = [](std::span<const double> u) {
    return u[0] * std::log(u[0]) + u[1] * std::log(u[1]);
  };
  loss.grad_phi = [](std::span<const double> u, std::span<double> out) {
    out[0] = std::log(u[0]) + 1.0;
    out[1] = std::log(u[1]) + 1.0;
  };
  loss.in_domain = [](std::span<const double> u) {
    return u[0] > 0.0 && u[1] > 0.0;
  };
  return loss;
}

namespace detail {

void BregmanEval::set_v(std::span<const double> v) {
  check_domain(*loss_, v, "v");
  v_.assign(v.begin(), v.end());
  loss_->grad_phi(v, grad_v_);
  phi_v_ = loss_->phi(v);
}

}  // namespace detail

}  // namespace lfp
