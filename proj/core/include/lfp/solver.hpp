#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lfp/bayes_risk.hpp"
#include "lfp/bregman.hpp"
#include "lfp/channel.hpp"
#include "lfp/distribution.hpp"
#include "lfp/support_set.hpp"

namespace lfp {

/// Moment constraint E[f(X)] <= bound. Constraints are metadata: they enter
/// the cardinality bounds but the solver itself handles support constraints
/// only and rejects specs with active constraints.
struct MomentConstraint {
  std::string name;
  std::function<double(std::span<const double>)> f;
  double bound = 0.0;
  /// Declares f bounded and continuous on a compact support set, which
  /// unlocks the refined cardinality bound.
  bool bounded_continuous = false;
};

struct ProblemSpec {
  Channel channel;
  BregmanLoss loss;
  SupportSet support;
  std::vector<MomentConstraint> moment_constraints;

  int input_dim() const { return channel.input_dim; }
  int alphabet_size() const { return channel.alphabet_size(); }
  int constraint_count() const {
    return static_cast<int>(moment_constraints.size());
  }
};

/// Support-size guarantees for some least favorable prior:
///   general:      N (k+1) (n+1)
///   t_compatible: N (k+1)          (requires the channel's T-compatibility)
///   refined:      (n+1)(N-1) + k+1 (compact support, bounded continuous f_i)
struct CardinalityBounds {
  int general = 0;
  int t_compatible = 0;
  int refined = 0;
};

CardinalityBounds cardinality_bounds(int N, int k, int n);
CardinalityBounds cardinality_bounds(const ProblemSpec& spec);

/// Default atom budget: the T-compatible bound when the channel declares
/// T-compatibility; otherwise min(general, refined) when the refined bound's
/// conditions hold (compact support, every constraint bounded continuous);
/// otherwise the general bound.
int default_atom_count(const ProblemSpec& spec);

enum class GradientMode { automatic, analytic, finite_difference };

struct SolverConfig {
  int atoms = 0;          // 0 selects default_atom_count
  double step = 0.0;      // 0 selects 0.1 * diameter(support)
  long max_iter = 200000;
  double grad_tol = 1e-8;
  double risk_tol = 1e-10;
  int restarts = 8;
  std::uint64_t seed = 0;
  double merge_radius = -1.0;     // <0 selects 1e-4 * diameter(support)
  double prune_threshold = 1e-6;
  GradientMode gradient_mode = GradientMode::automatic;
  int jobs = 1;                   // parallel restarts; result independent of jobs
  bool record_trace = true;
};

struct SolveResult {
  DiscreteDistribution prior;  // merged/pruned
  double risk = 0.0;           // exact re-evaluation on the returned prior
  int bound_used = 0;
  long iterations = 0;         // accepted ascent steps of the best restart
  bool converged = false;
  std::vector<std::pair<long, double>> trace;  // (iteration, risk), best restart
  std::vector<double> restart_risks;
  int best_restart = 0;
  std::string diagnostics;
};

/// Projected gradient ascent over the mass/location vector in R^{nd+d}:
/// locations project onto the support set, masses onto the simplex.
/// Backtracking halves the step on a risk decrease (the accepted trace is
/// nondecreasing within 1e-9) and doubles it after 20 consecutive accepts,
/// capped at 8x the initial step. Stops on a small projected step, a risk
/// plateau over 50 iterations, or max_iter. Restarts re-jitter the initial
/// grid; the best restart wins on risk, with support-size then seed-order
/// tie-breaking among risks within 1e-8.
SolveResult solve(const ProblemSpec& spec, const SolverConfig& config = {});

struct GridOracleResult {
  double risk = 0.0;
  std::vector<double> grid;    // fixed support locations
  std::vector<double> masses;
  long iterations = 0;
  bool converged = false;
  /// Ascent-certificate gap max_i dg/dp_i - R(p) at exit; the grid-restricted
  /// optimum lies within this gap above the returned risk.
  double certificate_gap = 0.0;
};

/// Concave verification oracle: fixes the support on a uniform grid over a
/// scalar box support and ascends the masses only, so the grid-restricted
/// global maximum is found. Lower-bounds the true value as the grid refines.
/// initial_masses (default uniform) is projected onto the simplex first; the
/// converged risk does not depend on it beyond the certificate gap.
GridOracleResult grid_oracle(const ProblemSpec& spec, int grid_points,
                             long max_iter = 200000,
                             std::span<const double> initial_masses = {});

/// Solves the spec produced by make_spec(value) for every value with a shared
/// config (seed derived per cell).
std::vector<SolveResult> sweep(
    const std::function<ProblemSpec(int)>& make_spec,
    std::span<const int> values, const SolverConfig& config = {});

}  // namespace lfp
