#pragma once

#include <span>
#include <vector>

#include "lfp/bayes_risk.hpp"
#include "lfp/bregman.hpp"
#include "lfp/channel.hpp"
#include "lfp/distribution.hpp"
#include "lfp/support_set.hpp"

namespace lfp {

/// Gradient of the risk with respect to the mass/location parameterization.
struct RiskGradient {
  std::vector<double> d_masses;              // d entries
  std::vector<std::vector<double>> d_points; // d entries of length n
};

/// Analytic gradient for scalar squared error:
///   dg/dp_i = E[(x_i - E[X|Y])^2 | X = x_i]
///   dg/dx_i = 2 p_i (x_i - E[E[X|Y] | X = x_i])
///             + p_i sum_j pmf'(y_j|x_i) (E[X|Y=y_j]^2 - 2 x_i E[X|Y=y_j])
/// with conditional expectations taken through the full posterior of `dist`
/// and sums restricted to active outputs. Requires n = 1 and a channel
/// derivative.
RiskGradient analytic_gradient_sq(const DiscreteDistribution& dist,
                                  const Channel& ch);

/// Central finite differences of the risk in the raw coordinates. Mass
/// perturbations are renormalization-free (all sums extend linearly in the
/// masses; the solver's projection owns feasibility). Location perturbations
/// are clipped to omega when it is given, switching to a one-sided difference
/// at the boundary. step <= 0 selects the default 1e-6 * (1 + |coordinate|).
RiskGradient fd_gradient(const DiscreteDistribution& dist, const Channel& ch,
                         const BregmanLoss& loss, double step = 0.0,
                         const SupportSet* omega = nullptr);

/// Mass partials dg/dp_i for any Bregman loss: the conditional risk of atom
/// i under the current posterior, sum_j pmf(y_j|x_i) l(x_i, E[X|Y=y_j]).
/// (The conditional-mean stationarity makes the posterior's own dependence
/// on p drop out.) Backs the grid oracle's mass-only ascent.
std::vector<double> conditional_risk_masses(const DiscreteDistribution& dist,
                                            const Channel& ch,
                                            const BregmanLoss& loss);

struct GradCheckReport {
  double max_rel_err = 0.0;
  int worst_entry = -1;  // flat index: masses 0..d-1, then locations d..d+dn-1
};

/// Compares the analytic squared-error gradient against central finite
/// differences, entrywise, with denominator max(1e-8, |analytic|).
GradCheckReport grad_check(const DiscreteDistribution& dist, const Channel& ch);

namespace detail {

// Flat-array analytic gradient used inside the solver loop; assumes `ws`
// already holds the posterior of (points, masses).
void eval_gradient_sq(std::span<const double> points,
                      std::span<const double> masses, const Channel& ch,
                      const RiskWorkspace& ws, std::span<double> d_masses,
                      std::span<double> d_points);

}  // namespace detail

}  // namespace lfp
