#include "lfp/gradient.hpp"

#include <cmath>
#include <stdexcept>

#include "lfp/detail/accumulate.hpp"

namespace lfp {
namespace detail {

void eval_gradient_sq(std::span<const double> points,
                      std::span<const double> masses, const Channel& ch,
                      const RiskWorkspace& ws, std::span<double> d_masses,
                      std::span<double> d_points) {
  const int d = ws.d;
  const int N = ws.N;
  for (int i = 0; i < d; ++i) {
    const double xi = points[i];
    const std::span<const double> x = points.subspan(i, 1);

    KahanSum cond_risk;   // E[(x_i - E[X|Y])^2 | X = x_i]
    KahanSum mean_cm;     // E[E[X|Y] | X = x_i]
    KahanSum deriv_term;  // sum_j pmf'(y_j|x_i) (c_j^2 - 2 x_i c_j)
    for (int j = 0; j < N; ++j) {
      if (!ws.active[j]) continue;
      const double pij = ws.pmf[static_cast<std::size_t>(i) * N + j];
      const double cj = ws.cond_mean[j];
      const double diff = xi - cj;
      cond_risk.add(pij * diff * diff);
      mean_cm.add(pij * cj);
      const double dij = ch.pmf_dx(j, x, 0);
      deriv_term.add(dij * (cj * cj - 2.0 * xi * cj));
    }
    d_masses[i] = cond_risk.value();
    d_points[i] =
        2.0 * masses[i] * (xi - mean_cm.value()) + masses[i] * deriv_term.value();
  }
}

}  // namespace detail

namespace {

std::vector<double> flatten(const DiscreteDistribution& dist) {
  const int d = dist.size(), n = dist.dim();
  std::vector<double> flat(static_cast<std::size_t>(d) * n);
  for (int i = 0; i < d; ++i) {
    for (int l = 0; l < n; ++l) {
      flat[static_cast<std::size_t>(i) * n + l] = dist.points[i][l];
    }
  }
  return flat;
}

}  // namespace

RiskGradient analytic_gradient_sq(const DiscreteDistribution& dist,
                                  const Channel& ch) {
  if (dist.dim() != 1) {
    throw std::invalid_argument("analytic_gradient_sq: supported for n = 1 only");
  }
  if (!ch.has_derivative()) {
    throw std::invalid_argument(
        "analytic_gradient_sq: channel provides no pmf derivative");
  }
  const std::vector<double> flat = flatten(dist);
  detail::RiskWorkspace ws;
  detail::eval_posterior(flat, dist.masses, 1, ch, ws);

  const int d = dist.size();
  std::vector<double> dm(d), dx(d);
  detail::eval_gradient_sq(flat, dist.masses, ch, ws, dm, dx);

  RiskGradient g;
  g.d_masses = std::move(dm);
  g.d_points.resize(d);
  for (int i = 0; i < d; ++i) g.d_points[i] = {dx[i]};
  return g;
}

RiskGradient fd_gradient(const DiscreteDistribution& dist, const Channel& ch,
                         const BregmanLoss& loss, double step,
                         const SupportSet* omega) {
  const int d = dist.size();
  const int n = dist.dim();
  std::vector<double> flat = flatten(dist);
  std::vector<double> masses = dist.masses;
  detail::RiskWorkspace ws;
  detail::eval_pmf(flat, n, ch, ws);

  auto step_for = [step](double coord) {
    return step > 0.0 ? step : 1e-6 * (1.0 + std::abs(coord));
  };

  RiskGradient g;
  g.d_masses.resize(d);
  g.d_points.assign(d, std::vector<double>(n, 0.0));

  // Mass partials reuse the pmf cache: only the weights change.
  for (int i = 0; i < d; ++i) {
    const double p0 = masses[i];
    const double h = step_for(p0);
    masses[i] = p0 + h;
    const double up = detail::eval_risk_cached(flat, masses, loss, ws);
    masses[i] = p0 - h;
    const double down = detail::eval_risk_cached(flat, masses, loss, ws);
    masses[i] = p0;
    g.d_masses[i] = (up - down) / (2.0 * h);
  }

  for (int i = 0; i < d; ++i) {
    for (int l = 0; l < n; ++l) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + l;
      const double x0 = flat[idx];
      const double h = step_for(x0);
      double hi = x0 + h, lo = x0 - h;
      if (omega) {
        // Clip to omega; one-sided difference at the boundary.
        std::vector<double> probe(flat.begin() + static_cast<std::size_t>(i) * n,
                                  flat.begin() + static_cast<std::size_t>(i + 1) * n);
        probe[l] = hi;
        if (!omega->contains(probe, 0.0)) hi = x0;
        probe[l] = lo;
        if (!omega->contains(probe, 0.0)) lo = x0;
        if (hi == lo) {
          g.d_points[i][l] = 0.0;  // degenerate coordinate (point support)
          continue;
        }
      }
      flat[idx] = hi;
      detail::eval_pmf_row(flat, i, ch, ws);
      const double up = detail::eval_risk_cached(flat, masses, loss, ws);
      flat[idx] = lo;
      detail::eval_pmf_row(flat, i, ch, ws);
      const double down = detail::eval_risk_cached(flat, masses, loss, ws);
      flat[idx] = x0;
      detail::eval_pmf_row(flat, i, ch, ws);
      g.d_points[i][l] = (up - down) / (hi - lo);
    }
  }
  return g;
}

std::vector<double> conditional_risk_masses(const DiscreteDistribution& dist,
                                            const Channel& ch,
                                            const BregmanLoss& loss) {
  const std::vector<double> flat = flatten(dist);
  detail::RiskWorkspace ws;
  detail::eval_posterior(flat, dist.masses, dist.dim(), ch, ws);
  std::vector<double> out(dist.size());
  detail::eval_conditional_risks(flat, loss, ws, out);
  return out;
}

GradCheckReport grad_check(const DiscreteDistribution& dist, const Channel& ch) {
  const RiskGradient analytic = analytic_gradient_sq(dist, ch);
  const RiskGradient fd = fd_gradient(dist, ch, squared_error_loss(1));

  GradCheckReport rep;
  const int d = dist.size();
  auto consider = [&rep](double a, double f, int flat_index) {
    const double rel = std::abs(a - f) / std::max(1e-8, std::abs(a));
    if (rel > rep.max_rel_err) {
      rep.max_rel_err = rel;
      rep.worst_entry = flat_index;
    }
  };
  for (int i = 0; i < d; ++i) consider(analytic.d_masses[i], fd.d_masses[i], i);
  for (int i = 0; i < d; ++i) {
    consider(analytic.d_points[i][0], fd.d_points[i][0], d + i);
  }
  return rep;
}

}  // namespace lfp
