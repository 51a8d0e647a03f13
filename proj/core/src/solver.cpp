#include "lfp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lfp/detail/accumulate.hpp"
#include "lfp/detail/rng.hpp"
#include "lfp/gradient.hpp"
#include "lfp/projection.hpp"

namespace lfp {
namespace {

constexpr double kAcceptSlack = 1e-9;  // accepted steps may lose at most this
constexpr int kPlateauWindow = 50;
constexpr int kAcceptStreakForGrowth = 20;
constexpr double kStepGrowthCap = 8.0;

struct RestartOutcome {
  std::vector<double> points;  // flat d*n
  std::vector<double> masses;
  long iterations = 0;
  bool converged = false;
  std::vector<std::pair<long, double>> trace;
};

struct Objective {
  const ProblemSpec* spec;
  bool analytic;

  double eval(std::span<const double> points, std::span<const double> masses,
              detail::RiskWorkspace& ws) const {
    return detail::eval_risk(points, masses, spec->input_dim(), spec->channel,
                             spec->loss, ws);
  }

  // Gradient at the point whose posterior is currently in ws.
  void gradient(std::span<const double> points, std::span<const double> masses,
                detail::RiskWorkspace& ws, std::span<double> d_masses,
                std::span<double> d_points) const {
    if (analytic) {
      detail::eval_gradient_sq(points, masses, spec->channel, ws, d_masses,
                               d_points);
      return;
    }
    DiscreteDistribution dist;
    const int n = spec->input_dim();
    const int d = static_cast<int>(masses.size());
    dist.masses.assign(masses.begin(), masses.end());
    dist.points.resize(d);
    for (int i = 0; i < d; ++i) {
      dist.points[i].assign(points.begin() + static_cast<std::size_t>(i) * n,
                            points.begin() + static_cast<std::size_t>(i + 1) * n);
    }
    const RiskGradient g =
        fd_gradient(dist, spec->channel, spec->loss, 0.0, &spec->support);
    std::copy(g.d_masses.begin(), g.d_masses.end(), d_masses.begin());
    for (int i = 0; i < d; ++i) {
      std::copy(g.d_points[i].begin(), g.d_points[i].end(),
                d_points.begin() + static_cast<std::size_t>(i) * n);
    }
  }
};

// Initial support: jittered uniform grid for n = 1, Latin-hypercube style
// stratified draws for n > 1, projected into the support set. Uniform masses.
void initialize(const ProblemSpec& spec, int d, detail::SplitMix64& rng,
                std::vector<double>& points, std::vector<double>& masses) {
  const int n = spec.input_dim();
  const BoxTarget bb = spec.support.bounding_box();
  points.resize(static_cast<std::size_t>(d) * n);

  if (n == 1) {
    const double h = (bb.hi[0] - bb.lo[0]) / d;
    for (int i = 0; i < d; ++i) {
      const double c = bb.lo[0] + (i + 0.5) * h;
      points[i] = c + rng.uniform(-0.5 * h, 0.5 * h);
    }
  } else {
    std::vector<std::vector<int>> perm(n, std::vector<int>(d));
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < d; ++i) perm[l][i] = i;
      for (int i = d - 1; i > 0; --i) {
        std::swap(perm[l][i], perm[l][rng.below(i + 1)]);
      }
    }
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l < n; ++l) {
        const double h = (bb.hi[l] - bb.lo[l]) / d;
        points[static_cast<std::size_t>(i) * n + l] =
            bb.lo[l] + (perm[l][i] + rng.uniform()) * h;
      }
    }
  }

  for (int i = 0; i < d; ++i) {
    const std::span<const double> x{points.data() + static_cast<std::size_t>(i) * n,
                                    static_cast<std::size_t>(n)};
    if (!spec.support.contains(x)) {
      const std::vector<double> proj = spec.support.project(x);
      std::copy(proj.begin(), proj.end(),
                points.begin() + static_cast<std::size_t>(i) * n);
    }
  }
  masses.assign(d, 1.0 / d);
}

void project_feasible(const ProblemSpec& spec, std::vector<double>& points,
                      std::vector<double>& masses) {
  const int n = spec.input_dim();
  const int d = static_cast<int>(masses.size());
  for (int i = 0; i < d; ++i) {
    const std::span<const double> x{points.data() + static_cast<std::size_t>(i) * n,
                                    static_cast<std::size_t>(n)};
    if (!spec.support.contains(x)) {
      const std::vector<double> proj = spec.support.project(x);
      std::copy(proj.begin(), proj.end(),
                points.begin() + static_cast<std::size_t>(i) * n);
    }
  }
  project_simplex_inplace(masses);
}

RestartOutcome run_restart(const ProblemSpec& spec, const SolverConfig& config,
                           int d, double step0, std::uint64_t restart_seed,
                           const Objective& objective) {
  const int n = spec.input_dim();
  detail::SplitMix64 rng(restart_seed);

  RestartOutcome out;
  initialize(spec, d, rng, out.points, out.masses);
  project_simplex_inplace(out.masses);

  detail::RiskWorkspace ws;
  double risk = objective.eval(out.points, out.masses, ws);
  if (config.record_trace) out.trace.emplace_back(0, risk);

  std::vector<double> d_masses(d), d_points(static_cast<std::size_t>(d) * n);
  std::vector<double> cand_points(out.points.size()), cand_masses(d);
  std::vector<double> ring(kPlateauWindow, risk);  // risk kPlateauWindow iters ago

  double lam = step0;
  const double lam_cap = kStepGrowthCap * step0;
  const double lam_floor = 1e-18 * std::max(1.0, step0);
  int accept_streak = 0;
  long iter = 0;

  while (iter < config.max_iter) {
    objective.gradient(out.points, out.masses, ws, d_masses, d_points);

    // Backtracking: shrink the step until the risk does not decrease.
    double cand_risk = risk;
    bool stalled = false;
    bool backtracked = false;
    for (;;) {
      for (std::size_t t = 0; t < cand_points.size(); ++t) {
        cand_points[t] = out.points[t] + lam * d_points[t];
      }
      for (int i = 0; i < d; ++i) {
        cand_masses[i] = out.masses[i] + lam * d_masses[i];
      }
      project_feasible(spec, cand_points, cand_masses);
      cand_risk = objective.eval(cand_points, cand_masses, ws);
      if (cand_risk >= risk - kAcceptSlack) break;
      backtracked = true;
      lam *= 0.5;
      if (lam < lam_floor) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      out.converged = true;  // no ascent step exists at any step size
      break;
    }

    ++iter;
    double step_inf = 0.0;
    for (std::size_t t = 0; t < cand_points.size(); ++t) {
      step_inf = std::max(step_inf, std::abs(cand_points[t] - out.points[t]));
    }
    for (int i = 0; i < d; ++i) {
      step_inf = std::max(step_inf, std::abs(cand_masses[i] - out.masses[i]));
    }
    out.points.swap(cand_points);
    out.masses.swap(cand_masses);
    risk = cand_risk;
    if (config.record_trace) out.trace.emplace_back(iter, risk);

    if (backtracked) {
      accept_streak = 0;
    } else if (++accept_streak >= kAcceptStreakForGrowth) {
      lam = std::min(2.0 * lam, lam_cap);
      accept_streak = 0;
    }

    if (step_inf <= config.grad_tol) {
      out.converged = true;
      break;
    }
    const long slot = iter % kPlateauWindow;
    if (iter >= kPlateauWindow && std::abs(risk - ring[slot]) <= config.risk_tol) {
      out.converged = true;
      break;
    }
    ring[slot] = risk;
  }

  out.iterations = iter;
  return out;
}

}  // namespace

CardinalityBounds cardinality_bounds(int N, int k, int n) {
  if (N < 1 || k < 0 || n < 1) {
    throw std::invalid_argument("cardinality_bounds: need N >= 1, k >= 0, n >= 1");
  }
  CardinalityBounds b;
  b.general = N * (k + 1) * (n + 1);
  b.t_compatible = N * (k + 1);
  b.refined = (n + 1) * (N - 1) + k + 1;
  return b;
}

CardinalityBounds cardinality_bounds(const ProblemSpec& spec) {
  return cardinality_bounds(spec.alphabet_size(), spec.constraint_count(),
                            spec.input_dim());
}

int default_atom_count(const ProblemSpec& spec) {
  const CardinalityBounds b = cardinality_bounds(spec);
  if (spec.channel.t_compatible) return b.t_compatible;
  const bool refined_ok =
      spec.support.is_compact() &&
      std::all_of(spec.moment_constraints.begin(), spec.moment_constraints.end(),
                  [](const MomentConstraint& c) { return c.bounded_continuous; });
  return refined_ok ? std::min(b.general, b.refined) : b.general;
}

SolveResult solve(const ProblemSpec& spec, const SolverConfig& config) {
  if (spec.alphabet_size() < 1) {
    throw std::invalid_argument("solve: channel output alphabet is empty");
  }
  if (spec.constraint_count() > 0) {
    throw std::invalid_argument(
        "solve: unsupported: k >= 1 (moment constraints enter the bounds only; "
        "the solver handles support constraints)");
  }
  if (spec.loss.dim != spec.input_dim()) {
    throw std::invalid_argument("solve: loss dimension does not match channel input_dim");
  }
  if (spec.support.dim() != spec.input_dim()) {
    throw std::invalid_argument("solve: support dimension does not match channel input_dim");
  }
  if (config.restarts < 1 || config.max_iter < 1) {
    throw std::invalid_argument("solve: restarts and max_iter must be positive");
  }

  Objective objective{&spec, false};
  switch (config.gradient_mode) {
    case GradientMode::analytic:
      if (spec.input_dim() != 1 || !spec.loss.has_analytic_gradient_support ||
          !spec.channel.has_derivative()) {
        throw std::invalid_argument(
            "solve: analytic gradients need n = 1, squared error, and a "
            "channel derivative");
      }
      objective.analytic = true;
      break;
    case GradientMode::finite_difference:
      objective.analytic = false;
      break;
    case GradientMode::automatic:
      objective.analytic = spec.input_dim() == 1 &&
                           spec.loss.has_analytic_gradient_support &&
                           spec.channel.has_derivative();
      break;
  }

  const int d = config.atoms > 0 ? config.atoms : default_atom_count(spec);
  const double diam = spec.support.diameter();
  double step0 = config.step > 0.0 ? config.step
                                   : (diam > 0.0 ? 0.1 * diam : 1.0);
  if (!std::isfinite(step0)) step0 = 1.0;
  double merge_radius =
      config.merge_radius >= 0.0 ? config.merge_radius : 1e-4 * diam;
  if (!std::isfinite(merge_radius)) merge_radius = 0.0;

  std::vector<RestartOutcome> outcomes(config.restarts);
  const int jobs = std::max(1, std::min(config.jobs, config.restarts));
  if (jobs == 1) {
    for (int r = 0; r < config.restarts; ++r) {
      outcomes[r] = run_restart(spec, config, d, step0,
                                detail::derive_seed(config.seed, r), objective);
    }
  } else {
    // Restarts are independent and deterministic given their derived seed,
    // so the outcome set does not depend on scheduling.
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= config.restarts) return;
        outcomes[r] = run_restart(spec, config, d, step0,
                                  detail::derive_seed(config.seed, r), objective);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Post-process every restart the same way, then pick the best by exact
  // risk; near-ties (1e-8) prefer the smaller support, then the earlier seed.
  const int n = spec.input_dim();
  std::vector<DiscreteDistribution> priors(config.restarts);
  std::vector<double> restart_risks(config.restarts);
  for (int r = 0; r < config.restarts; ++r) {
    DiscreteDistribution raw;
    raw.masses = outcomes[r].masses;
    raw.points.resize(d);
    for (int i = 0; i < d; ++i) {
      raw.points[i].assign(
          outcomes[r].points.begin() + static_cast<std::size_t>(i) * n,
          outcomes[r].points.begin() + static_cast<std::size_t>(i + 1) * n);
    }
    priors[r] = merge_and_prune(raw, merge_radius, config.prune_threshold);
    restart_risks[r] = bayes_risk(priors[r], spec.channel, spec.loss);
  }

  int best = 0;
  for (int r = 1; r < config.restarts; ++r) {
    if (restart_risks[r] > restart_risks[best] + 1e-8) {
      best = r;
    } else if (std::abs(restart_risks[r] - restart_risks[best]) <= 1e-8 &&
               priors[r].size() < priors[best].size()) {
      best = r;
    }
  }

  SolveResult result;
  result.prior = std::move(priors[best]);
  result.risk = restart_risks[best];
  result.bound_used = d;
  result.iterations = outcomes[best].iterations;
  result.converged = outcomes[best].converged;
  result.trace = std::move(outcomes[best].trace);
  result.restart_risks = std::move(restart_risks);
  result.best_restart = best;

  int ties = 0;
  for (int r = 0; r < config.restarts; ++r) {
    if (r != best && std::abs(result.restart_risks[r] - result.risk) <= 1e-8) {
      ++ties;
    }
  }
  if (ties > 0) {
    std::ostringstream os;
    os << ties << " restart(s) tied within 1e-8 of the best risk; reported "
       << "the smallest support among them";
    result.diagnostics = os.str();
  }
  return result;
}

GridOracleResult grid_oracle(const ProblemSpec& spec, int grid_points,
                             long max_iter,
                             std::span<const double> initial_masses) {
  if (spec.input_dim() != 1) {
    throw std::invalid_argument("grid_oracle: scalar supports only");
  }
  if (!spec.support.has_box() || spec.support.has_ball()) {
    throw std::invalid_argument("grid_oracle: box support required");
  }
  if (grid_points < 1) {
    throw std::invalid_argument("grid_oracle: grid_points must be >= 1");
  }
  if (!initial_masses.empty() &&
      static_cast<int>(initial_masses.size()) != grid_points) {
    throw std::invalid_argument("grid_oracle: initial_masses length mismatch");
  }

  GridOracleResult res;
  const double lo = spec.support.box_part().lo[0];
  const double hi = spec.support.box_part().hi[0];
  res.grid.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    res.grid[i] = grid_points == 1 ? 0.5 * (lo + hi)
                                   : lo + (hi - lo) * i / (grid_points - 1);
  }

  std::vector<double> masses(grid_points, 1.0 / grid_points);
  if (!initial_masses.empty()) {
    masses.assign(initial_masses.begin(), initial_masses.end());
    project_simplex_inplace(masses);
  }
  detail::RiskWorkspace ws;
  detail::eval_pmf(res.grid, 1, spec.channel, ws);  // support is fixed

  std::vector<double> r_i(grid_points), grad(grid_points), cand(grid_points);

  // Masses only: the risk is concave in p (an infimum of linear functionals),
  // so ascent plus the certificate below finds the grid-restricted global
  // optimum. The certificate uses R(q) <= max_i dg/dp_i for all simplex q.
  auto risks_at = [&](std::span<const double> p) {
    detail::eval_stats(res.grid, p, ws);
    detail::eval_conditional_risks(res.grid, spec.loss, ws, r_i);
    detail::KahanSum total;
    for (int i = 0; i < grid_points; ++i) total.add(p[i] * r_i[i]);
    return total.value();
  };

  double risk = risks_at(masses);
  constexpr double kGapTol = 1e-11;
  double lam = 1.0;
  int accept_streak = 0;
  std::vector<double> ring(kPlateauWindow, risk);
  long iter = 0;

  while (iter < max_iter) {
    // r_i holds the conditional risks at `masses`; snapshot them, since the
    // candidate evaluations below reuse the buffer.
    grad = r_i;
    double max_r = grad[0];
    for (double v : grad) max_r = std::max(max_r, v);
    res.certificate_gap = max_r - risk;
    if (res.certificate_gap <= kGapTol) {
      res.converged = true;
      break;
    }

    double cand_risk = risk;
    bool stalled = false;
    bool backtracked = false;
    for (;;) {
      for (int i = 0; i < grid_points; ++i) cand[i] = masses[i] + lam * grad[i];
      project_simplex_inplace(cand);
      cand_risk = risks_at(cand);
      if (cand_risk >= risk - 1e-15) break;
      backtracked = true;
      lam *= 0.5;
      if (lam < 1e-18) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      res.converged = res.certificate_gap <= 1e-8;
      break;
    }
    ++iter;
    masses.swap(cand);
    risk = cand_risk;
    if (backtracked) {
      accept_streak = 0;
    } else if (++accept_streak >= kAcceptStreakForGrowth) {
      lam = std::min(2.0 * lam, kStepGrowthCap);
      accept_streak = 0;
    }
    const long slot = iter % kPlateauWindow;
    if (iter >= kPlateauWindow && std::abs(risk - ring[slot]) <= 1e-13) {
      res.converged = res.certificate_gap <= 1e-8;
      break;
    }
    ring[slot] = risk;
  }

  // Canonical evaluation order for the reported value.
  res.risk = detail::eval_risk_cached(res.grid, masses, spec.loss, ws);
  res.masses = std::move(masses);
  res.iterations = iter;
  return res;
}

std::vector<SolveResult> sweep(const std::function<ProblemSpec(int)>& make_spec,
                               std::span<const int> values,
                               const SolverConfig& config) {
  std::vector<SolveResult> results;
  results.reserve(values.size());
  for (std::size_t c = 0; c < values.size(); ++c) {
    SolverConfig cell = config;
    cell.seed = detail::derive_seed(config.seed, 0x5eedULL + c);
    results.push_back(solve(make_spec(values[c]), cell));
  }
  return results;
}

}  // namespace lfp
