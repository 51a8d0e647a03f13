#include "lfp/bayes_risk.hpp"

#include <cmath>
#include <stdexcept>

#include "lfp/detail/accumulate.hpp"

namespace lfp {
namespace detail {

void RiskWorkspace::resize(int d_, int n_, int N_) {
  d = d_;
  n = n_;
  N = N_;
  pmf.resize(static_cast<std::size_t>(d) * N);
  marginal.resize(N);
  cond_mean.resize(static_cast<std::size_t>(N) * n);
  active.resize(N);
  phi_x.resize(d);
}

void eval_pmf(std::span<const double> points, int n, const Channel& ch,
              RiskWorkspace& ws) {
  const int d = static_cast<int>(points.size()) / n;
  ws.resize(d, n, ch.alphabet_size());
  for (int i = 0; i < d; ++i) eval_pmf_row(points, i, ch, ws);
}

void eval_pmf_row(std::span<const double> points, int i, const Channel& ch,
                  RiskWorkspace& ws) {
  const std::span<const double> x =
      points.subspan(static_cast<std::size_t>(i) * ws.n, ws.n);
  for (int j = 0; j < ws.N; ++j) {
    ws.pmf[static_cast<std::size_t>(i) * ws.N + j] = ch.pmf(j, x);
  }
}

void eval_stats(std::span<const double> points, std::span<const double> masses,
                RiskWorkspace& ws) {
  const int d = ws.d, n = ws.n, N = ws.N;
  for (int j = 0; j < N; ++j) {
    KahanSum denom;
    for (int i = 0; i < d; ++i) {
      denom.add(masses[i] * ws.pmf[static_cast<std::size_t>(i) * N + j]);
    }
    const double pj = denom.value();
    ws.marginal[j] = pj;
    ws.active[j] = pj > 0.0 ? 1 : 0;
    for (int l = 0; l < n; ++l) {
      if (ws.active[j]) {
        KahanSum numer;
        for (int i = 0; i < d; ++i) {
          numer.add(masses[i] * points[static_cast<std::size_t>(i) * n + l] *
                    ws.pmf[static_cast<std::size_t>(i) * N + j]);
        }
        ws.cond_mean[static_cast<std::size_t>(j) * n + l] = numer.value() / pj;
      } else {
        ws.cond_mean[static_cast<std::size_t>(j) * n + l] = 0.0;
      }
    }
  }
}

namespace {

void fill_phi_x(std::span<const double> points, const BregmanLoss& loss,
                RiskWorkspace& ws, const char* caller) {
  for (int i = 0; i < ws.d; ++i) {
    const std::span<const double> x =
        points.subspan(static_cast<std::size_t>(i) * ws.n, ws.n);
    if (loss.in_domain && !loss.in_domain(x)) {
      throw std::domain_error(std::string(caller) +
                              ": support point outside loss domain (" +
                              loss.domain_note + ")");
    }
    ws.phi_x[i] = loss.phi(x);
  }
}

std::span<const double> cond_mean_of(const RiskWorkspace& ws, int j) {
  return {ws.cond_mean.data() + static_cast<std::size_t>(j) * ws.n,
          static_cast<std::size_t>(ws.n)};
}

}  // namespace

double eval_risk_cached(std::span<const double> points,
                        std::span<const double> masses,
                        const BregmanLoss& loss, RiskWorkspace& ws) {
  eval_stats(points, masses, ws);
  fill_phi_x(points, loss, ws, "bayes_risk");

  BregmanEval eval(loss);
  KahanSum risk;
  for (int j = 0; j < ws.N; ++j) {
    if (!ws.active[j]) continue;
    const std::span<const double> cj = cond_mean_of(ws, j);
    if (loss.in_domain && !loss.in_domain(cj)) {
      throw std::domain_error("bayes_risk: conditional mean outside loss domain (" +
                              loss.domain_note + ")");
    }
    eval.set_v(cj);
    for (int i = 0; i < ws.d; ++i) {
      const double w = masses[i] * ws.pmf[static_cast<std::size_t>(i) * ws.N + j];
      if (w == 0.0) continue;
      const std::span<const double> x =
          points.subspan(static_cast<std::size_t>(i) * ws.n, ws.n);
      risk.add(w * eval(x, ws.phi_x[i]));
    }
  }
  return risk.value();
}

void eval_conditional_risks(std::span<const double> points,
                            const BregmanLoss& loss, RiskWorkspace& ws,
                            std::span<double> out) {
  fill_phi_x(points, loss, ws, "conditional_risk_masses");
  std::vector<KahanSum> acc(ws.d);
  BregmanEval eval(loss);
  for (int j = 0; j < ws.N; ++j) {
    if (!ws.active[j]) continue;
    const std::span<const double> cj = cond_mean_of(ws, j);
    if (loss.in_domain && !loss.in_domain(cj)) {
      throw std::domain_error(
          "conditional_risk_masses: conditional mean outside loss domain (" +
          loss.domain_note + ")");
    }
    eval.set_v(cj);
    for (int i = 0; i < ws.d; ++i) {
      const std::span<const double> x =
          points.subspan(static_cast<std::size_t>(i) * ws.n, ws.n);
      acc[i].add(ws.pmf[static_cast<std::size_t>(i) * ws.N + j] *
                 eval(x, ws.phi_x[i]));
    }
  }
  for (int i = 0; i < ws.d; ++i) out[i] = acc[i].value();
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

void check_pair(const DiscreteDistribution& dist, const Channel& ch) {
  if (dist.size() < 1) throw std::invalid_argument("empty distribution");
  if (dist.dim() != ch.input_dim) {
    throw std::invalid_argument("distribution dimension does not match channel input_dim");
  }
}

}  // namespace

PosteriorTable posterior(const DiscreteDistribution& dist, const Channel& ch) {
  check_pair(dist, ch);
  const std::vector<double> flat = flatten(dist);
  detail::RiskWorkspace ws;
  detail::eval_posterior(flat, dist.masses, dist.dim(), ch, ws);

  PosteriorTable table;
  table.marginal = ws.marginal;
  table.cond_mean.resize(ws.N);
  for (int j = 0; j < ws.N; ++j) {
    if (ws.active[j]) {
      table.cond_mean[j].assign(
          ws.cond_mean.begin() + static_cast<std::size_t>(j) * ws.n,
          ws.cond_mean.begin() + static_cast<std::size_t>(j + 1) * ws.n);
      table.active_outputs.push_back(j);
    }
  }
  return table;
}

double bayes_risk(const DiscreteDistribution& dist, const Channel& ch,
                  const BregmanLoss& loss) {
  check_pair(dist, ch);
  if (loss.dim != dist.dim()) {
    throw std::invalid_argument("loss dimension does not match distribution");
  }
  const std::vector<double> flat = flatten(dist);
  detail::RiskWorkspace ws;
  return detail::eval_risk(flat, dist.masses, dist.dim(), ch, loss, ws);
}

double mmse_risk(const DiscreteDistribution& dist, const Channel& ch) {
  check_pair(dist, ch);
  if (dist.dim() != 1) {
    throw std::invalid_argument("mmse_risk: supported for scalar inputs only");
  }
  const std::vector<double> flat = flatten(dist);
  detail::RiskWorkspace ws;
  detail::eval_posterior(flat, dist.masses, 1, ch, ws);

  detail::KahanSum second_moment;
  for (int i = 0; i < ws.d; ++i) {
    second_moment.add(dist.masses[i] * flat[i] * flat[i]);
  }
  detail::KahanSum posterior_second;
  for (int j = 0; j < ws.N; ++j) {
    if (!ws.active[j]) continue;
    posterior_second.add(ws.marginal[j] * ws.cond_mean[j] * ws.cond_mean[j]);
  }
  return second_moment.value() - posterior_second.value();
}

double risk_of_estimator(
    const DiscreteDistribution& dist, const Channel& ch,
    const BregmanLoss& loss,
    const std::function<std::vector<double>(int)>& estimator) {
  check_pair(dist, ch);
  const std::vector<double> flat = flatten(dist);
  detail::RiskWorkspace ws;
  detail::eval_posterior(flat, dist.masses, dist.dim(), ch, ws);

  const int d = ws.d, n = ws.n, N = ws.N;
  for (int i = 0; i < d; ++i) {
    const std::span<const double> x{flat.data() + static_cast<std::size_t>(i) * n,
                                    static_cast<std::size_t>(n)};
    if (loss.in_domain && !loss.in_domain(x)) {
      throw std::domain_error("risk_of_estimator: support point outside loss domain");
    }
    ws.phi_x[i] = loss.phi(x);
  }

  detail::BregmanEval eval(loss);
  detail::KahanSum risk;
  for (int j = 0; j < N; ++j) {
    if (!ws.active[j]) continue;
    const std::vector<double> fj = estimator(j);
    if (static_cast<int>(fj.size()) != n) {
      throw std::invalid_argument("risk_of_estimator: estimator dimension mismatch");
    }
    if (loss.in_domain && !loss.in_domain(fj)) {
      throw std::domain_error("risk_of_estimator: estimator value outside loss domain");
    }
    eval.set_v(fj);
    for (int i = 0; i < d; ++i) {
      const double w = dist.masses[i] * ws.pmf[static_cast<std::size_t>(i) * N + j];
      if (w == 0.0) continue;
      const std::span<const double> x{flat.data() + static_cast<std::size_t>(i) * n,
                                      static_cast<std::size_t>(n)};
      risk.add(w * eval(x, ws.phi_x[i]));
    }
  }
  return risk.value();
}

}  // namespace lfp
