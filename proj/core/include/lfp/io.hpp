#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "lfp/bayes_risk.hpp"
#include "lfp/channel.hpp"
#include "lfp/distribution.hpp"
#include "lfp/solver.hpp"

namespace lfp {

/// {"points": [[...], ...], "masses": [...]}; points are arrays even for
/// scalar supports.
nlohmann::json to_json(const DiscreteDistribution& dist);
DiscreteDistribution distribution_from_json(const nlohmann::json& j);

/// {"marginal": [...], "cond_mean": [[...] | null, ...], "active_outputs": [...]};
/// inactive outputs carry null conditional means.
nlohmann::json to_json(const PosteriorTable& table);

nlohmann::json to_json(const CardinalityBounds& bounds);

/// Result payload without the iteration trace (that goes to CSV);
/// include_trace embeds it for library users.
nlohmann::json to_json(const SolveResult& result, bool include_trace = false);

/// Builds a table channel from {"outputs": [...], "grid_x": [...],
/// "pmf_rows": [[...], ...]}.
Channel table_channel_from_json(const nlohmann::json& j);

/// Shortest-width round-trippable formatting ("%.17g") used by every CSV
/// writer, so reruns are byte-identical.
std::string format_double(double x);

void write_trace_csv(std::ostream& os,
                     std::span<const std::pair<long, double>> trace);

/// One row per atom per swept parameter value: parameter, atom, location..., mass.
void write_support_csv(std::ostream& os, std::span<const int> params,
                       std::span<const SolveResult> results);

/// Stem data mirroring the per-parameter prior pmfs: parameter, location..., mass.
void write_pmf_csv(std::ostream& os, std::span<const int> params,
                   std::span<const SolveResult> results);

}  // namespace lfp
