#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "lfp/bayes_risk.hpp"
#include "lfp/detail/accumulate.hpp"
#include "lfp/detail/rng.hpp"
#include "lfp/gradient.hpp"
#include "support/oracles.hpp"

using namespace lfp;

namespace {

DiscreteDistribution scalar_dist(std::vector<double> pts, std::vector<double> ms) {
  DiscreteDistribution d;
  for (double p : pts) d.points.push_back({p});
  d.masses = std::move(ms);
  return d;
}

}  // namespace

TEST_SUITE("gradients") {

TEST_CASE("point-mass prior has zero mass-gradient entries") {
  const auto ch = binomial_channel(3);
  const auto dist = scalar_dist({0.4}, {1.0});
  const auto g = analytic_gradient_sq(dist, ch);
  CHECK(std::abs(g.d_masses[0]) <= 1e-14);
  const auto fd = fd_gradient(dist, ch, squared_error_loss(1));
  CHECK(std::abs(fd.d_masses[0]) <= 1e-8);
}

TEST_CASE("analytic matches finite differences on a two-atom prior") {
  const auto ch = binomial_channel(1);
  const auto dist = scalar_dist({0.25, 0.75}, {0.5, 0.5});
  const auto an = analytic_gradient_sq(dist, ch);
  const auto fd = fd_gradient(dist, ch, squared_error_loss(1), 1e-6);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(std::abs(an.d_masses[i] - fd.d_masses[i]) <=
            1e-6 * std::max(1.0, std::abs(an.d_masses[i])));
    REQUIRE(std::abs(an.d_points[i][0] - fd.d_points[i][0]) <=
            1e-6 * std::max(1.0, std::abs(an.d_points[i][0])));
  }
}

TEST_CASE("stationarity at the derived two-point optimum") {
  const auto ch = binomial_channel(1);
  const double lo = (2.0 - std::sqrt(2.0)) / 4.0;
  const double hi = (2.0 + std::sqrt(2.0)) / 4.0;
  const auto g = analytic_gradient_sq(scalar_dist({lo, hi}, {0.5, 0.5}), ch);
  // Mass gradient components must agree (simplex-tangent part vanishes) and
  // location gradients must vanish outright at the interior maximizer.
  CHECK(std::abs(g.d_masses[0] - g.d_masses[1]) <= 1e-6);
  CHECK(std::abs(g.d_points[0][0]) <= 1e-6);
  CHECK(std::abs(g.d_points[1][0]) <= 1e-6);
}

TEST_CASE("grad_check over random instances on both channels") {
  detail::SplitMix64 rng(61);
  for (int t = 0; t < 60; ++t) {
    const bool binom = t % 2 == 0;
    const auto ch = binom ? binomial_channel(1 + static_cast<int>(rng.below(8)))
                          : quantized_gaussian_channel(1 + static_cast<int>(rng.below(4)));
    const double lo = binom ? 0.05 : -4.5, hi = binom ? 0.95 : 4.5;
    const auto dist = oracle::random_distribution(
        rng, 2 + static_cast<int>(rng.below(5)), lo, hi);
    const auto rep = grad_check(dist, ch);
    REQUIRE(rep.max_rel_err <= 1e-5);
  }
}

TEST_CASE("grad_check pins from the named instances") {
  detail::SplitMix64 rng(62);
  const auto b = grad_check(oracle::random_distribution(rng, 4, 0.05, 0.95),
                            binomial_channel(3));
  CHECK(b.max_rel_err <= 1e-5);
  const auto q = grad_check(oracle::random_distribution(rng, 5, -4.5, 4.5),
                            quantized_gaussian_channel(2));
  CHECK(q.max_rel_err <= 1e-5);
}

TEST_CASE("mass partial is the conditional risk through the full posterior") {
  detail::SplitMix64 rng(63);
  const auto ch = quantized_gaussian_channel(2);
  const auto dist = oracle::random_distribution(rng, 5, -4.0, 4.0);
  const auto table = posterior(dist, ch);
  const auto g = analytic_gradient_sq(dist, ch);
  for (int i = 0; i < dist.size(); ++i) {
    detail::KahanSum direct;
    for (int j : table.active_outputs) {
      const double pij = ch.pmf(j, dist.points[i]);
      const double diff = dist.points[i][0] - table.cond_mean[j][0];
      direct.add(pij * diff * diff);
    }
    REQUIRE(std::abs(g.d_masses[i] - direct.value()) <= 1e-12);
  }
}

TEST_CASE("envelope consistency: mass-weighted partials reproduce the risk") {
  detail::SplitMix64 rng(64);
  for (int t = 0; t < 200; ++t) {
    const bool binom = t % 2 == 0;
    const auto ch = binom ? binomial_channel(2 + static_cast<int>(rng.below(5)))
                          : quantized_gaussian_channel(1 + static_cast<int>(rng.below(3)));
    const double lo = binom ? 0.0 : -5.0, hi = binom ? 1.0 : 5.0;
    const auto dist = oracle::random_distribution(rng, 4, lo, hi);
    const auto g = analytic_gradient_sq(dist, ch);
    detail::KahanSum weighted;
    for (int i = 0; i < dist.size(); ++i) weighted.add(dist.masses[i] * g.d_masses[i]);
    const double risk = bayes_risk(dist, ch, squared_error_loss(1));
    REQUIRE(std::abs(weighted.value() - risk) <= 1e-10);
  }
}

TEST_CASE("conditional_risk_masses equals the analytic mass partials") {
  detail::SplitMix64 rng(65);
  const auto ch = binomial_channel(4);
  const auto dist = oracle::random_distribution(rng, 6, 0.0, 1.0);
  const auto g = analytic_gradient_sq(dist, ch);
  const auto cr = conditional_risk_masses(dist, ch, squared_error_loss(1));
  for (int i = 0; i < dist.size(); ++i) {
    REQUIRE(std::abs(g.d_masses[i] - cr[i]) <= 1e-12);
  }
}

TEST_CASE("fd on the generalized I-divergence over a 2-D channel") {
  detail::SplitMix64 rng(66);
  const auto ch = oracle::ratio_channel_2d();
  const auto gid = generalized_i_divergence();
  const auto dist = oracle::random_distribution_nd(rng, 4, 2, 0.6, 1.8);
  const auto g5 = fd_gradient(dist, ch, gid, 1e-5);
  const auto g6 = fd_gradient(dist, ch, gid, 1e-6);
  for (int i = 0; i < dist.size(); ++i) {
    REQUIRE(std::isfinite(g5.d_masses[i]));
    REQUIRE(std::abs(g5.d_masses[i] - g6.d_masses[i]) <=
            1e-3 * std::max(1.0, std::abs(g6.d_masses[i])));
    for (int l = 0; l < 2; ++l) {
      REQUIRE(std::isfinite(g5.d_points[i][l]));
      REQUIRE(std::abs(g5.d_points[i][l] - g6.d_points[i][l]) <=
              1e-3 * std::max(1.0, std::abs(g6.d_points[i][l])));
    }
  }
}

TEST_CASE("boundary atoms use one-sided location differences") {
  const auto ch = binomial_channel(2);
  const auto omega = SupportSet::box({0.0}, {1.0});
  const auto dist = scalar_dist({0.0, 0.6, 1.0}, {0.3, 0.4, 0.3});
  const auto fd = fd_gradient(dist, ch, squared_error_loss(1), 0.0, &omega);
  const auto an = analytic_gradient_sq(dist, ch);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(std::abs(fd.d_points[i][0] - an.d_points[i][0]) <=
            1e-4 * std::max(1.0, std::abs(an.d_points[i][0])));
  }
}

TEST_CASE("preconditions are enforced") {
  const auto ch_noderiv = [] {
    auto ch = binomial_channel(2);
    ch.pmf_dx = nullptr;
    return ch;
  }();
  CHECK_THROWS_AS(analytic_gradient_sq(scalar_dist({0.5}, {1.0}), ch_noderiv),
                  std::invalid_argument);
  detail::SplitMix64 rng(67);
  const auto dist2d = oracle::random_distribution_nd(rng, 3, 2, 0.6, 1.8);
  CHECK_THROWS_AS(analytic_gradient_sq(dist2d, oracle::ratio_channel_2d()),
                  std::invalid_argument);
}

}  // TEST_SUITE
