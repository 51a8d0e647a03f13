#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lfp/bregman.hpp"
#include "lfp/channel.hpp"
#include "lfp/distribution.hpp"

namespace lfp {

/// Output marginal and conditional means of a (prior, channel) pair. Outputs
/// with zero marginal are inactive: their conditional mean is undefined and
/// they are excluded from every downstream sum.
struct PosteriorTable {
  std::vector<double> marginal;                // N entries, sums to 1
  std::vector<std::vector<double>> cond_mean;  // empty vector for inactive j
  std::vector<int> active_outputs;

  bool is_active(int j) const { return !cond_mean[j].empty(); }
};

PosteriorTable posterior(const DiscreteDistribution& dist, const Channel& ch);

/// Bayes risk E[l(X, E[X|Y])], the infimum over estimators for a Bregman
/// loss. Throws std::domain_error if a support point or an active
/// conditional mean leaves the loss domain.
double bayes_risk(const DiscreteDistribution& dist, const Channel& ch,
                  const BregmanLoss& loss);

/// Squared-error risk via the variance decomposition E[X^2] - E[E[X|Y]^2];
/// scalar inputs only. Agrees with bayes_risk(.., squared_error_loss(1))
/// to 1e-12.
double mmse_risk(const DiscreteDistribution& dist, const Channel& ch);

/// Expected loss of an arbitrary estimator y_j -> estimator(j). Never less
/// than bayes_risk beyond rounding.
double risk_of_estimator(
    const DiscreteDistribution& dist, const Channel& ch,
    const BregmanLoss& loss,
    const std::function<std::vector<double>(int)>& estimator);

namespace detail {

// Flat-array evaluation path shared by the solver, the gradient module, and
// the grid oracle: no allocation after the first resize, deterministic
// ordered reductions, compensated sums. Masses may be any real vector
// (finite-difference perturbations included); every statistic is the literal
// linear/ratio extension of the simplex formulas.
struct RiskWorkspace {
  int d = 0, n = 0, N = 0;
  std::vector<double> pmf;        // d x N, row-major [i*N + j]
  std::vector<double> marginal;   // N
  std::vector<double> cond_mean;  // N x n, [j*n + l]; valid only when active
  std::vector<char> active;       // N
  std::vector<double> phi_x;      // d, phi(x_i) cache for the risk sums

  void resize(int d_, int n_, int N_);
};

// Fills the pmf cache for the given support points (d inferred from the
// span length). Mass-only callers do this once and then reuse the cache.
void eval_pmf(std::span<const double> points, int n, const Channel& ch,
              RiskWorkspace& ws);

// Re-fills row i of the pmf cache (after perturbing one support point).
void eval_pmf_row(std::span<const double> points, int i, const Channel& ch,
                  RiskWorkspace& ws);

// Marginal, conditional means, and the active set from the cached pmf.
void eval_stats(std::span<const double> points, std::span<const double> masses,
                RiskWorkspace& ws);

// Posterior statistics + risk from the cached pmf.
double eval_risk_cached(std::span<const double> points,
                        std::span<const double> masses,
                        const BregmanLoss& loss, RiskWorkspace& ws);

// Per-atom conditional risks sum_j pmf(y_j|x_i) l(x_i, E[X|Y=y_j]) from the
// cached pmf and current stats; these are the mass partials dg/dp_i.
void eval_conditional_risks(std::span<const double> points,
                            const BregmanLoss& loss, RiskWorkspace& ws,
                            std::span<double> out);

inline void eval_posterior(std::span<const double> points,
                           std::span<const double> masses, int n,
                           const Channel& ch, RiskWorkspace& ws) {
  eval_pmf(points, n, ch, ws);
  eval_stats(points, masses, ws);
}

inline double eval_risk(std::span<const double> points,
                        std::span<const double> masses, int n,
                        const Channel& ch, const BregmanLoss& loss,
                        RiskWorkspace& ws) {
  eval_pmf(points, n, ch, ws);
  return eval_risk_cached(points, masses, loss, ws);
}

}  // namespace detail

}  // namespace lfp
