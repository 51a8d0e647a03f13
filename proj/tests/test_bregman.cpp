#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "lfp/bregman.hpp"
#include "lfp/detail/accumulate.hpp"
#include "lfp/detail/rng.hpp"

using namespace lfp;

namespace {

// Closed-form cross-check oracles; the library side always evaluates through
// the generic generator path.
double sq_closed_form(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t l = 0; l < u.size(); ++l) s += (u[l] - v[l]) * (u[l] - v[l]);
  return s;
}

double gid_closed_form(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t l = 0; l < u.size(); ++l) {
    s += u[l] * std::log(u[l] / v[l]) - (u[l] - v[l]);
  }
  return s;
}

// a*phi1 + b*phi2 combination used by the linearity property.
BregmanLoss combine(const BregmanLoss& l1, const BregmanLoss& l2, double a,
                    double b) {
  BregmanLoss out;
  out.dim = l1.dim;
  out.domain_note = "combined";
  out.phi = [=, p1 = l1.phi, p2 = l2.phi](std::span<const double> u) {
    return a * p1(u) + b * p2(u);
  };
  out.grad_phi = [=, g1 = l1.grad_phi, g2 = l2.grad_phi](
                     std::span<const double> u, std::span<double> o) {
    std::vector<double> t1(u.size()), t2(u.size());
    g1(u, t1);
    g2(u, t2);
    for (std::size_t l = 0; l < u.size(); ++l) o[l] = a * t1[l] + b * t2[l];
  };
  out.in_domain = [d1 = l1.in_domain, d2 = l2.in_domain](std::span<const double> u) {
    return (!d1 || d1(u)) && (!d2 || d2(u));
  };
  return out;
}

}  // namespace

TEST_SUITE("bregman") {

TEST_CASE("squared error pins") {
  const auto sq1 = squared_error_loss(1);
  CHECK(bregman_loss(sq1, std::vector{3.0}, std::vector{1.0}) == doctest::Approx(4.0));
  CHECK(bregman_loss(sq1, std::vector{0.5}, std::vector{0.25}) ==
        doctest::Approx(0.0625));
  const auto sq2 = squared_error_loss(2);
  CHECK(bregman_loss(sq2, std::vector{1.0, 2.0}, std::vector{0.0, 0.0}) ==
        doctest::Approx(5.0));
  CHECK(sq1.has_analytic_gradient_support);
  CHECK_FALSE(sq2.has_analytic_gradient_support);
}

TEST_CASE("squared error equals |u-v|^2 to machine precision and is symmetric") {
  detail::SplitMix64 rng(31);
  const auto sq = squared_error_loss(1);
  for (int t = 0; t < 500; ++t) {
    const std::vector<double> u = {rng.uniform(-10, 10)};
    const std::vector<double> v = {rng.uniform(-10, 10)};
    const double lv = bregman_loss(sq, u, v);
    REQUIRE(std::abs(lv - sq_closed_form(u, v)) <= 1e-12 * (1.0 + lv));
    REQUIRE(std::abs(lv - bregman_loss(sq, v, u)) <= 1e-12 * (1.0 + lv));
  }
}

TEST_CASE("generalized I-divergence pins (generic path vs closed form)") {
  const auto gid = generalized_i_divergence();
  const double e = std::exp(1.0);
  CHECK(bregman_loss(gid, std::vector{2.0, 3.0}, std::vector{2.0, 3.0}) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(bregman_loss(gid, std::vector{1.0, 1.0}, std::vector{e, 1.0}) ==
        doctest::Approx(e - 2.0).epsilon(1e-13));
  CHECK(bregman_loss(gid, std::vector{2.0, 1.0}, std::vector{1.0, 1.0}) ==
        doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("generic path matches Eq-7-style closed form within 1e-12") {
  detail::SplitMix64 rng(32);
  const auto gid = generalized_i_divergence();
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> u = {rng.uniform(0.1, 8.0), rng.uniform(0.1, 8.0)};
    const std::vector<double> v = {rng.uniform(0.1, 8.0), rng.uniform(0.1, 8.0)};
    REQUIRE(std::abs(bregman_loss(gid, u, v) - gid_closed_form(u, v)) <= 1e-12);
  }
}

TEST_CASE("domain violations are hard errors") {
  const auto gid = generalized_i_divergence();
  CHECK_THROWS_AS(bregman_loss(gid, std::vector{-1.0, 1.0}, std::vector{1.0, 1.0}),
                  std::domain_error);
  CHECK_THROWS_AS(bregman_loss(gid, std::vector{1.0, 1.0}, std::vector{1.0, 0.0}),
                  std::domain_error);
}

TEST_CASE("non-negativity with equality only near u = v") {
  detail::SplitMix64 rng(33);
  const auto sq = squared_error_loss(2);
  const auto gid = generalized_i_divergence();
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> u = {rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)};
    const std::vector<double> v = {rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)};
    for (const auto* loss : {&sq, &gid}) {
      const double lv = bregman_loss(*loss, u, v);
      REQUIRE(lv >= -1e-12);
      if (lv <= 1e-10) {
        const double dist = std::hypot(u[0] - v[0], u[1] - v[1]);
        REQUIRE(dist <= 1e-4);
      }
    }
  }
}

TEST_CASE("convexity in the first argument") {
  detail::SplitMix64 rng(34);
  const auto gid = generalized_i_divergence();
  const auto sq = squared_error_loss(2);
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> u1 = {rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)};
    const std::vector<double> u2 = {rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)};
    const std::vector<double> v = {rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)};
    for (double alpha : {0.25, 0.5, 0.75}) {
      const std::vector<double> mix = {alpha * u1[0] + (1 - alpha) * u2[0],
                                       alpha * u1[1] + (1 - alpha) * u2[1]};
      for (const auto* loss : {&gid, &sq}) {
        const double lhs = bregman_loss(*loss, mix, v);
        const double rhs = alpha * bregman_loss(*loss, u1, v) +
                           (1 - alpha) * bregman_loss(*loss, u2, v);
        REQUIRE(lhs <= rhs + 1e-10);
      }
    }
  }
}

TEST_CASE("linearity in the generator") {
  detail::SplitMix64 rng(35);
  const auto sq = squared_error_loss(2);
  const auto gid = generalized_i_divergence();
  for (int t = 0; t < 1000; ++t) {
    const double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
    const auto mix = combine(sq, gid, a, b);
    const std::vector<double> u = {rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)};
    const std::vector<double> v = {rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0)};
    const double want =
        a * bregman_loss(sq, u, v) + b * bregman_loss(gid, u, v);
    REQUIRE(std::abs(bregman_loss(mix, u, v) - want) <= 1e-10);
  }
}

TEST_CASE("Pythagorean identity for a discrete X and constant u") {
  detail::SplitMix64 rng(36);
  const auto gid = generalized_i_divergence();
  const auto sq = squared_error_loss(2);
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + static_cast<int>(rng.below(5));
    std::vector<std::vector<double>> xs(d);
    std::vector<double> ps(d);
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
      xs[i] = {rng.uniform(0.3, 4.0), rng.uniform(0.3, 4.0)};
      ps[i] = 0.05 + rng.uniform();
      total += ps[i];
    }
    for (double& p : ps) p /= total;
    std::vector<double> mean = {0.0, 0.0};
    for (int i = 0; i < d; ++i) {
      mean[0] += ps[i] * xs[i][0];
      mean[1] += ps[i] * xs[i][1];
    }
    const std::vector<double> u = {rng.uniform(0.3, 4.0), rng.uniform(0.3, 4.0)};

    for (const auto* loss : {&gid, &sq}) {
      detail::KahanSum lhs, spread;
      for (int i = 0; i < d; ++i) {
        lhs.add(ps[i] * bregman_loss(*loss, xs[i], u));
        spread.add(ps[i] * bregman_loss(*loss, xs[i], mean));
      }
      const double rhs = spread.value() + bregman_loss(*loss, mean, u);
      REQUIRE(std::abs(lhs.value() - rhs) <= 1e-10);
    }
  }
}

}  // TEST_SUITE
