#include "lfp/io.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace lfp {

nlohmann::json to_json(const DiscreteDistribution& dist) {
  nlohmann::json j;
  j["points"] = dist.points;
  j["masses"] = dist.masses;
  return j;
}

DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.contains("points") || !j.contains("masses")) {
    throw std::runtime_error("distribution JSON needs \"points\" and \"masses\"");
  }
  DiscreteDistribution dist;
  dist.points = j.at("points").get<std::vector<std::vector<double>>>();
  dist.masses = j.at("masses").get<std::vector<double>>();
  if (dist.points.size() != dist.masses.size()) {
    throw std::runtime_error("distribution JSON: points/masses length mismatch");
  }
  for (const auto& p : dist.points) {
    if (p.size() != dist.points.front().size()) {
      throw std::runtime_error("distribution JSON: ragged points");
    }
  }
  return dist;
}

nlohmann::json to_json(const PosteriorTable& table) {
  nlohmann::json j;
  j["marginal"] = table.marginal;
  nlohmann::json cm = nlohmann::json::array();
  for (std::size_t k = 0; k < table.cond_mean.size(); ++k) {
    if (table.cond_mean[k].empty()) {
      cm.push_back(nullptr);
    } else {
      cm.push_back(table.cond_mean[k]);
    }
  }
  j["cond_mean"] = std::move(cm);
  j["active_outputs"] = table.active_outputs;
  return j;
}

nlohmann::json to_json(const CardinalityBounds& bounds) {
  return nlohmann::json{{"general", bounds.general},
                        {"t_compatible", bounds.t_compatible},
                        {"refined", bounds.refined}};
}

nlohmann::json to_json(const SolveResult& result, bool include_trace) {
  nlohmann::json j;
  j["risk"] = result.risk;
  j["prior"] = to_json(result.prior);
  j["bound_used"] = result.bound_used;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["best_restart"] = result.best_restart;
  j["restart_risks"] = result.restart_risks;
  j["diagnostics"] = result.diagnostics;
  if (include_trace) {
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& [it, risk] : result.trace) {
      tr.push_back(nlohmann::json::array({it, risk}));
    }
    j["trace"] = std::move(tr);
  }
  return j;
}

Channel table_channel_from_json(const nlohmann::json& j) {
  for (const char* key : {"outputs", "grid_x", "pmf_rows"}) {
    if (!j.contains(key)) {
      throw std::runtime_error(std::string("table channel JSON needs \"") + key + "\"");
    }
  }
  return table_channel(j.at("outputs").get<std::vector<double>>(),
                       j.at("grid_x").get<std::vector<double>>(),
                       j.at("pmf_rows").get<std::vector<std::vector<double>>>());
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trace_csv(std::ostream& os,
                     std::span<const std::pair<long, double>> trace) {
  os << "iteration,risk\n";
  for (const auto& [it, risk] : trace) {
    os << it << ',' << format_double(risk) << '\n';
  }
}

namespace {

void write_location(std::ostream& os, const std::vector<double>& x) {
  for (double c : x) os << ',' << format_double(c);
}

int location_dim(std::span<const SolveResult> results) {
  return results.empty() ? 1 : results.front().prior.dim();
}

void write_location_header(std::ostream& os, int n) {
  if (n == 1) {
    os << ",location";
  } else {
    for (int l = 0; l < n; ++l) os << ",location_" << l;
  }
}

}  // namespace

void write_support_csv(std::ostream& os, std::span<const int> params,
                       std::span<const SolveResult> results) {
  os << "parameter,atom";
  write_location_header(os, location_dim(results));
  os << ",mass\n";
  for (std::size_t c = 0; c < results.size(); ++c) {
    const DiscreteDistribution& prior = results[c].prior;
    for (int i = 0; i < prior.size(); ++i) {
      os << params[c] << ',' << i;
      write_location(os, prior.points[i]);
      os << ',' << format_double(prior.masses[i]) << '\n';
    }
  }
}

void write_pmf_csv(std::ostream& os, std::span<const int> params,
                   std::span<const SolveResult> results) {
  os << "parameter";
  write_location_header(os, location_dim(results));
  os << ",mass\n";
  for (std::size_t c = 0; c < results.size(); ++c) {
    const DiscreteDistribution& prior = results[c].prior;
    for (int i = 0; i < prior.size(); ++i) {
      os << params[c];
      write_location(os, prior.points[i]);
      os << ',' << format_double(prior.masses[i]) << '\n';
    }
  }
}

}  // namespace lfp
