#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "lfp/bayes_risk.hpp"
#include "lfp/detail/rng.hpp"
#include "support/oracles.hpp"

using namespace lfp;

namespace {

DiscreteDistribution scalar_dist(std::vector<double> pts, std::vector<double> ms) {
  DiscreteDistribution d;
  for (double p : pts) d.points.push_back({p});
  d.masses = std::move(ms);
  return d;
}

// The two-point optimum for one Bernoulli trial, derived from maximizing
// s(1-s)(1 - 4 s(1-s)) over symmetric priors {s, 1-s}: s = (2 - sqrt
// 2)/4, value 1/16.
const double kOptLo = (2.0 - std::sqrt(2.0)) / 4.0;
const double kOptHi = (2.0 + std::sqrt(2.0)) / 4.0;

}  // namespace

TEST_SUITE("bayes_risk") {

TEST_CASE("posterior of a point mass is the point") {
  const auto ch = binomial_channel(2);
  const auto table = posterior(scalar_dist({0.3}, {1.0}), ch);
  for (int j : table.active_outputs) {
    CHECK(table.cond_mean[j][0] == doctest::Approx(0.3).epsilon(1e-14));
  }
}

TEST_CASE("two-atom posterior, hand-evaluated") {
  const auto ch = binomial_channel(1);
  const auto table = posterior(scalar_dist({0.25, 0.75}, {0.5, 0.5}), ch);
  CHECK(table.marginal[1] == doctest::Approx(0.5).epsilon(1e-15));
  // (0.5*0.25^2 + 0.5*0.75^2) / 0.5
  CHECK(table.cond_mean[1][0] == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(table.cond_mean[0][0] == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("marginal sums to 1; conditional means stay in the hull") {
  detail::SplitMix64 rng(51);
  for (int t = 0; t < 500; ++t) {
    const bool binom = rng.below(2) == 0;
    const auto ch = binom ? binomial_channel(1 + static_cast<int>(rng.below(6)))
                          : quantized_gaussian_channel(1 + static_cast<int>(rng.below(3)));
    const double lo = binom ? 0.0 : -5.0, hi = binom ? 1.0 : 5.0;
    const auto dist =
        oracle::random_distribution(rng, 1 + static_cast<int>(rng.below(7)), lo, hi);
    const auto table = posterior(dist, ch);

    double sum = 0.0;
    for (double m : table.marginal) sum += m;
    REQUIRE(std::abs(sum - 1.0) <= 1e-12);

    double xmin = dist.points[0][0], xmax = xmin;
    for (const auto& p : dist.points) {
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
    }
    for (int j : table.active_outputs) {
      REQUIRE(table.cond_mean[j][0] >= xmin - 1e-10);
      REQUIRE(table.cond_mean[j][0] <= xmax + 1e-10);
    }
  }
}

TEST_CASE("risk pins") {
  const auto ch = binomial_channel(1);
  const auto sq = squared_error_loss(1);

  CHECK(bayes_risk(scalar_dist({0.3}, {1.0}), ch, sq) ==
        doctest::Approx(0.0).epsilon(1e-15));

  // Least favorable two-point prior: risk exactly 1/16.
  CHECK(bayes_risk(scalar_dist({kOptLo, kOptHi}, {0.5, 0.5}), ch, sq) ==
        doctest::Approx(0.0625).epsilon(1e-13));

  // Endpoints are revealed exactly by one trial.
  CHECK(bayes_risk(scalar_dist({0.0, 1.0}, {0.5, 0.5}), ch, sq) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("mmse pins") {
  const auto ch = binomial_channel(1);
  CHECK(mmse_risk(scalar_dist({0.4}, {1.0}), ch) == doctest::Approx(0.0));
  CHECK(mmse_risk(scalar_dist({kOptLo, kOptHi}, {0.5, 0.5}), ch) ==
        doctest::Approx(0.0625).epsilon(1e-13));
  CHECK(mmse_risk(scalar_dist({0.0, 1.0}, {0.5, 0.5}), ch) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("mmse identity equals the generic Bregman route, 1e3 instances") {
  detail::SplitMix64 rng(52);
  const auto sq = squared_error_loss(1);
  for (int t = 0; t < 1000; ++t) {
    const bool binom = rng.below(2) == 0;
    const auto ch = binom ? binomial_channel(1 + static_cast<int>(rng.below(6)))
                          : quantized_gaussian_channel(1 + static_cast<int>(rng.below(3)));
    const double lo = binom ? 0.0 : -5.0, hi = binom ? 1.0 : 5.0;
    const auto dist =
        oracle::random_distribution(rng, 1 + static_cast<int>(rng.below(7)), lo, hi);
    REQUIRE(std::abs(mmse_risk(dist, ch) - bayes_risk(dist, ch, sq)) <= 1e-12);
  }
}

TEST_CASE("optimal estimator reproduces the Bayes risk") {
  const auto ch = binomial_channel(3);
  const auto sq = squared_error_loss(1);
  detail::SplitMix64 rng(53);
  const auto dist = oracle::random_distribution(rng, 5, 0.0, 1.0);
  const auto table = posterior(dist, ch);
  const double direct = bayes_risk(dist, ch, sq);
  const double via_estimator = risk_of_estimator(
      dist, ch, sq, [&](int j) { return table.cond_mean[j]; });
  CHECK(std::abs(direct - via_estimator) <= 1e-14);
}

TEST_CASE("constant estimator at the mean matches E[l(X, E[X])]") {
  detail::SplitMix64 rng(54);
  const auto ch = binomial_channel(2);
  const auto sq = squared_error_loss(1);
  const auto dist = oracle::random_distribution(rng, 4, 0.0, 1.0);
  const auto mean = dist.mean();
  double spread = 0.0;
  for (int i = 0; i < dist.size(); ++i) {
    spread += dist.masses[i] * (dist.points[i][0] - mean[0]) * (dist.points[i][0] - mean[0]);
  }
  const double got =
      risk_of_estimator(dist, ch, sq, [&](int) { return mean; });
  CHECK(got == doctest::Approx(spread).epsilon(1e-12));
}

TEST_CASE("constant-risk minimax estimator for the binomial family") {
  // f(y) = (y + sqrt(m)/2) / (m + sqrt(m)) has conditional risk
  // 1/(4 (1+sqrt m)^2) independent of x; checked by expanding the
  // conditional expectation at 50 grid points.
  detail::SplitMix64 rng(55);
  for (int m : {1, 2, 4, 7}) {
    const auto ch = binomial_channel(m);
    const double root = std::sqrt(static_cast<double>(m));
    const double want = 1.0 / (4.0 * (1.0 + root) * (1.0 + root));
    for (int g = 0; g < 50; ++g) {
      const double x = g / 49.0;
      double r = 0.0;
      for (int y = 0; y <= m; ++y) {
        const double f = (y + root / 2.0) / (m + root);
        r += ch.pmf(y, std::vector{x}) * (x - f) * (x - f);
      }
      REQUIRE(std::abs(r - want) <= 1e-12);
    }
    // Hence every prior's estimator risk is that constant.
    const auto dist = oracle::random_distribution(rng, 6, 0.0, 1.0);
    const double got = risk_of_estimator(
        dist, ch, squared_error_loss(1),
        [&](int y) { return std::vector<double>{(y + root / 2.0) / (m + root)}; });
    REQUIRE(std::abs(got - want) <= 1e-12);
  }
}

TEST_CASE("Pythagorean decomposition of estimator excess risk") {
  detail::SplitMix64 rng(56);
  const auto sq = squared_error_loss(1);
  for (int t = 0; t < 300; ++t) {
    const auto ch = quantized_gaussian_channel(2);
    const auto dist = oracle::random_distribution(rng, 4, -5.0, 5.0);
    const auto table = posterior(dist, ch);
    std::vector<std::vector<double>> f(ch.alphabet_size());
    for (auto& v : f) v = {rng.uniform(-5.0, 5.0)};
    const double excess =
        risk_of_estimator(dist, ch, sq, [&](int j) { return f[j]; }) -
        bayes_risk(dist, ch, sq);
    double decomposed = 0.0;
    for (int j : table.active_outputs) {
      decomposed += table.marginal[j] *
                    bregman_loss(sq, table.cond_mean[j], f[j]);
    }
    REQUIRE(std::abs(excess - decomposed) <= 1e-10);
  }
}

TEST_CASE("no estimator beats the Bayes risk, 1e3 random estimators") {
  detail::SplitMix64 rng(57);
  const auto sq = squared_error_loss(1);
  const auto ch = binomial_channel(3);
  const auto dist = oracle::random_distribution(rng, 5, 0.0, 1.0);
  const double bayes = bayes_risk(dist, ch, sq);
  for (int t = 0; t < 1000; ++t) {
    const double got = risk_of_estimator(dist, ch, sq, [&](int) {
      return std::vector<double>{rng.uniform(0.0, 1.0)};
    });
    REQUIRE(got >= bayes - 1e-12);
  }
}

TEST_CASE("risk is concave in the masses for fixed support") {
  detail::SplitMix64 rng(58);
  const auto sq = squared_error_loss(1);
  for (int t = 0; t < 1000; ++t) {
    const auto ch = t % 2 == 0 ? binomial_channel(2) : quantized_gaussian_channel(1);
    const double lo = t % 2 == 0 ? 0.0 : -5.0, hi = t % 2 == 0 ? 1.0 : 5.0;
    const int d = 3 + static_cast<int>(rng.below(4));
    auto base = oracle::random_distribution(rng, d, lo, hi);
    auto q = base;
    double total = 0.0;
    for (double& p : q.masses) {
      p = 0.02 + rng.uniform();
      total += p;
    }
    for (double& p : q.masses) p /= total;

    for (double alpha : {0.25, 0.5, 0.75}) {
      auto mix = base;
      for (int i = 0; i < d; ++i) {
        mix.masses[i] = alpha * base.masses[i] + (1 - alpha) * q.masses[i];
      }
      const double lhs = bayes_risk(mix, ch, sq);
      const double rhs = alpha * bayes_risk(base, ch, sq) +
                         (1 - alpha) * bayes_risk(q, ch, sq);
      REQUIRE(lhs >= rhs - 1e-10);
    }
  }
}

TEST_CASE("domain violations surface as domain_error") {
  const auto gid = generalized_i_divergence();
  DiscreteDistribution dist;
  dist.points = {{0.0, 1.0}};  // on the boundary, outside the open orthant
  dist.masses = {1.0};
  const auto ch = oracle::ratio_channel_2d();
  CHECK_THROWS_AS(bayes_risk(dist, ch, gid), std::domain_error);
}

TEST_CASE("gid risk on a 2-D channel is finite and nonnegative") {
  detail::SplitMix64 rng(59);
  const auto gid = generalized_i_divergence();
  const auto ch = oracle::ratio_channel_2d();
  for (int t = 0; t < 100; ++t) {
    const auto dist = oracle::random_distribution_nd(rng, 4, 2, 0.5, 2.0);
    const double r = bayes_risk(dist, ch, gid);
    REQUIRE(std::isfinite(r));
    REQUIRE(r >= -1e-12);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const auto ch = binomial_channel(1);
  detail::SplitMix64 rng(3);
  const auto dist2d = oracle::random_distribution_nd(rng, 2, 2, 0.1, 0.9);
  CHECK_THROWS_AS(mmse_risk(dist2d, oracle::ratio_channel_2d()),
                  std::invalid_argument);
  DiscreteDistribution empty;
  CHECK_THROWS_AS(posterior(empty, ch), std::invalid_argument);
}

}  // TEST_SUITE
