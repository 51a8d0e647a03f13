// lfp: least-favorable-prior computations for finite-output channels.
// Subcommands: solve | sweep | bounds | risk-eval | grad-check | rerun.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lfp/bayes_risk.hpp"
#include "lfp/detail/rng.hpp"
#include "lfp/gradient.hpp"
#include "lfp/io.hpp"
#include "lfp/solver.hpp"
#include "lfp/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 64;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// ---------------------------------------------------------------------------
// Flag bundles.

struct ChannelFlags {
  std::string name;  // binomial | qgauss | table
  int m = 1;
  int levels = 1;
  std::string table_path;
  std::vector<double> omega;  // lo hi; empty selects the channel default
};

struct SolveFlags {
  std::string loss = "sq";
  int atoms = 0;
  double step = 0.0;
  long max_iter = 200000;
  double grad_tol = 1e-8;
  double risk_tol = 1e-10;
  int restarts = 8;
  std::uint64_t seed = 0;
  double merge_radius = -1.0;
  double prune_threshold = 1e-6;
  std::string gradient_mode = "auto";
  int jobs = 1;
  std::string out;
  std::string format = "json";
};

void add_channel_flags(CLI::App* cmd, ChannelFlags& ch, bool ranged) {
  cmd->add_option("--channel", ch.name,
                  ranged ? "Channel model: binomial | qgauss"
                         : "Channel model: binomial | qgauss | table")
      ->required();
  if (!ranged) {
    cmd->add_option("--m", ch.m, "Binomial trial count");
    cmd->add_option("--levels", ch.levels,
                    "Quantizer level count (outputs -levels..levels)");
    cmd->add_option("--table", ch.table_path, "Path to a table-channel JSON file");
  }
  cmd->add_option("--omega", ch.omega, "Support interval: lo hi")->expected(2);
}

void add_solver_flags(CLI::App* cmd, SolveFlags& c) {
  cmd->add_option("--loss", c.loss, "Loss: sq | gid")
      ->check(CLI::IsMember({"sq", "gid"}));
  cmd->add_option("--d", c.atoms, "Atom budget (0 = tightest applicable bound)");
  cmd->add_option("--step", c.step, "Initial ascent step (0 = 0.1 * diameter)");
  cmd->add_option("--max-iter", c.max_iter, "Iteration cap per restart");
  cmd->add_option("--grad-tol", c.grad_tol, "Projected-step stopping tolerance");
  cmd->add_option("--risk-tol", c.risk_tol, "Risk-plateau stopping tolerance");
  cmd->add_option("--restarts", c.restarts, "Independent restarts");
  cmd->add_option("--seed", c.seed, "Base RNG seed");
  cmd->add_option("--merge-radius", c.merge_radius,
                  "Atom coalescing radius (<0 = 1e-4 * diameter)");
  cmd->add_option("--prune-threshold", c.prune_threshold, "Minimum atom mass kept");
  cmd->add_option("--gradient-mode", c.gradient_mode, "auto | analytic | fd")
      ->check(CLI::IsMember({"auto", "analytic", "fd"}));
  cmd->add_option("--jobs", c.jobs, "Parallel restarts");
  cmd->add_option("--out", c.out, "Directory for result files and the run manifest");
  cmd->add_option("--format", c.format, "Stdout format: json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

struct BuiltChannel {
  lfp::Channel channel;
  lfp::SupportSet support;
  std::string input_extra;  // raw table file bytes, folded into the digest
};

BuiltChannel build_channel(const ChannelFlags& flags) {
  if (flags.omega.size() == 2 && !(flags.omega[0] <= flags.omega[1])) {
    throw std::invalid_argument("--omega expects lo <= hi");
  }
  auto omega_or = [&](double lo, double hi) {
    if (flags.omega.size() == 2) {
      return lfp::SupportSet::box({flags.omega[0]}, {flags.omega[1]});
    }
    return lfp::SupportSet::box({lo}, {hi});
  };

  if (flags.name == "binomial") {
    return {lfp::binomial_channel(flags.m), omega_or(0.0, 1.0), ""};
  }
  if (flags.name == "qgauss") {
    return {lfp::quantized_gaussian_channel(flags.levels), omega_or(-5.0, 5.0), ""};
  }
  if (flags.name == "table") {
    if (flags.table_path.empty()) {
      throw std::invalid_argument("--table FILE is required for the table channel");
    }
    const std::string raw = read_file(flags.table_path);
    const json j = json::parse(raw);
    auto ch = lfp::table_channel_from_json(j);
    const auto grid = j.at("grid_x").get<std::vector<double>>();
    return {std::move(ch), omega_or(grid.front(), grid.back()), raw};
  }
  throw std::invalid_argument("unknown channel '" + flags.name +
                              "' (expected binomial | qgauss | table)");
}

lfp::BregmanLoss build_loss(const std::string& name, int n) {
  if (name == "sq") return lfp::squared_error_loss(n);
  if (name == "gid") {
    if (n != 2) {
      throw std::invalid_argument(
          "gid loss is defined on R^2; every CLI channel is scalar, so gid is "
          "reachable only through the library API");
    }
    return lfp::generalized_i_divergence();
  }
  throw std::invalid_argument("unknown loss '" + name + "'");
}

lfp::SolverConfig build_config(const SolveFlags& c) {
  lfp::SolverConfig cfg;
  cfg.atoms = c.atoms;
  cfg.step = c.step;
  cfg.max_iter = c.max_iter;
  cfg.grad_tol = c.grad_tol;
  cfg.risk_tol = c.risk_tol;
  cfg.restarts = c.restarts;
  cfg.seed = c.seed;
  cfg.merge_radius = c.merge_radius;
  cfg.prune_threshold = c.prune_threshold;
  cfg.jobs = c.jobs;
  if (c.gradient_mode == "analytic") cfg.gradient_mode = lfp::GradientMode::analytic;
  if (c.gradient_mode == "fd") cfg.gradient_mode = lfp::GradientMode::finite_difference;
  return cfg;
}

json config_json(const ChannelFlags& ch, const SolveFlags& c) {
  json j;
  j["channel"] = ch.name;
  if (ch.name == "binomial") j["m"] = ch.m;
  if (ch.name == "qgauss") j["levels"] = ch.levels;
  if (ch.name == "table") j["table"] = ch.table_path;
  if (ch.omega.size() == 2) j["omega"] = ch.omega;
  j["loss"] = c.loss;
  j["d"] = c.atoms;
  j["step"] = c.step;
  j["max_iter"] = c.max_iter;
  j["grad_tol"] = c.grad_tol;
  j["risk_tol"] = c.risk_tol;
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  j["merge_radius"] = c.merge_radius;
  j["prune_threshold"] = c.prune_threshold;
  j["gradient_mode"] = c.gradient_mode;
  j["jobs"] = c.jobs;
  j["format"] = c.format;
  return j;
}

// ---------------------------------------------------------------------------
// Run manifest: enough to reproduce a run byte-for-byte on the same build.
// The deterministic part is embedded in stdout payloads; wall-clock lands
// only in the manifest file.

struct ManifestInfo {
  std::string command;
  std::vector<std::string> argv;
  json config;
  std::uint64_t seed = 0;
  std::string input_digest;
};

json manifest_json(const ManifestInfo& m) {
  json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["version"] = LFP_VERSION_STRING;
  j["input_digest"] = m.input_digest;
  return j;
}

void write_manifest(const fs::path& dir, const ManifestInfo& m,
                    double wall_clock_sec) {
  json j = manifest_json(m);
  j["wall_clock_sec"] = wall_clock_sec;
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

std::string digest_of(const json& config, const std::string& extra) {
  return "fnv1a:" + hex64(fnv1a(extra, fnv1a(config.dump())));
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

// ---------------------------------------------------------------------------

// "a..b" (inclusive), "a,b,c", or a single integer.
std::vector<int> parse_range(const std::string& text) {
  std::vector<int> values;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("range '" + text + "' is empty");
    for (int v = lo; v <= hi; ++v) values.push_back(v);
    return values;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stoi(item));
  if (values.empty()) throw std::invalid_argument("empty parameter list");
  return values;
}

void print_solve_csv(std::ostream& os, const lfp::SolveResult& res) {
  const int n = res.prior.dim();
  os << "atom";
  if (n == 1) {
    os << ",location";
  } else {
    for (int l = 0; l < n; ++l) os << ",location_" << l;
  }
  os << ",mass\n";
  for (int i = 0; i < res.prior.size(); ++i) {
    os << i;
    for (double c : res.prior.points[i]) os << ',' << lfp::format_double(c);
    os << ',' << lfp::format_double(res.prior.masses[i]) << '\n';
  }
}

int run_cli(const std::vector<std::string>& argv);

// --- solve ------------------------------------------------------------------

int cmd_solve(const ChannelFlags& chf, const SolveFlags& cf,
              const std::vector<std::string>& argv) {
  Stopwatch watch;
  BuiltChannel built = build_channel(chf);
  const int n = built.support.dim();
  const std::string input_extra = built.input_extra;
  lfp::ProblemSpec spec{std::move(built.channel), build_loss(cf.loss, n),
                        std::move(built.support), {}};
  const lfp::SolverConfig config = build_config(cf);
  const lfp::SolveResult result = lfp::solve(spec, config);

  const json cfg = config_json(chf, cf);
  ManifestInfo manifest{"solve", argv, cfg, cf.seed, digest_of(cfg, input_extra)};

  json payload = lfp::to_json(result);
  payload["manifest"] = manifest_json(manifest);
  if (cf.format == "csv") {
    print_solve_csv(std::cout, result);
  } else {
    std::cout << payload.dump(2) << '\n';
  }

  if (!cf.out.empty()) {
    const fs::path dir(cf.out);
    fs::create_directories(dir);
    write_file(dir / "result.json", payload.dump(2) + "\n");
    std::ostringstream trace;
    lfp::write_trace_csv(trace, result.trace);
    write_file(dir / "trace.csv", trace.str());
    write_manifest(dir, manifest, watch.seconds());
  }
  return result.converged ? kExitOk : kExitNotConverged;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const ChannelFlags& chf, const SolveFlags& cf,
              const std::string& m_range, const std::string& levels_range,
              const std::vector<std::string>& argv) {
  Stopwatch watch;
  if (cf.out.empty()) throw std::invalid_argument("sweep requires --out DIR");

  std::vector<int> values;
  if (chf.name == "binomial") {
    if (m_range.empty()) throw std::invalid_argument("sweep over binomial needs --m");
    values = parse_range(m_range);
  } else if (chf.name == "qgauss") {
    if (levels_range.empty()) {
      throw std::invalid_argument("sweep over qgauss needs --levels");
    }
    values = parse_range(levels_range);
  } else {
    throw std::invalid_argument("sweep supports the binomial and qgauss channels");
  }

  auto make_spec = [&](int value) {
    ChannelFlags cell = chf;
    if (chf.name == "binomial") cell.m = value;
    if (chf.name == "qgauss") cell.levels = value;
    BuiltChannel built = build_channel(cell);
    const int n = built.support.dim();
    return lfp::ProblemSpec{std::move(built.channel), build_loss(cf.loss, n),
                            std::move(built.support),
                            {}};
  };

  const lfp::SolverConfig config = build_config(cf);
  const std::vector<lfp::SolveResult> results =
      lfp::sweep(make_spec, values, config);

  const fs::path dir(cf.out);
  fs::create_directories(dir);
  std::ostringstream support, pmf;
  lfp::write_support_csv(support, values, results);
  lfp::write_pmf_csv(pmf, values, results);
  write_file(dir / "support.csv", support.str());
  write_file(dir / "pmf.csv", pmf.str());

  json cfg = config_json(chf, cf);
  cfg["values"] = values;
  ManifestInfo manifest{"sweep", argv, cfg, cf.seed, digest_of(cfg, "")};
  write_manifest(dir, manifest, watch.seconds());

  json summary;
  summary["values"] = values;
  json risks = json::array();
  bool all_converged = true;
  for (const auto& r : results) {
    risks.push_back(r.risk);
    all_converged = all_converged && r.converged;
  }
  summary["risks"] = std::move(risks);
  summary["out"] = cf.out;
  summary["manifest"] = manifest_json(manifest);
  std::cout << summary.dump(2) << '\n';
  return all_converged ? kExitOk : kExitNotConverged;
}

// --- bounds -----------------------------------------------------------------

int cmd_bounds(int N, int k, int n, const std::string& out,
               const std::string& format, const std::vector<std::string>& argv) {
  Stopwatch watch;
  const lfp::CardinalityBounds b = lfp::cardinality_bounds(N, k, n);
  const json cfg{{"N", N}, {"k", k}, {"n", n}};
  ManifestInfo manifest{"bounds", argv, cfg, 0, digest_of(cfg, "")};

  json payload = lfp::to_json(b);
  payload["manifest"] = manifest_json(manifest);
  if (format == "csv") {
    std::cout << "general,t_compatible,refined\n"
              << b.general << ',' << b.t_compatible << ',' << b.refined << '\n';
  } else {
    std::cout << payload.dump(2) << '\n';
  }
  if (!out.empty()) {
    const fs::path dir(out);
    fs::create_directories(dir);
    write_file(dir / "bounds.json", payload.dump(2) + "\n");
    write_manifest(dir, manifest, watch.seconds());
  }
  return kExitOk;
}

// --- risk-eval ----------------------------------------------------------------

int cmd_risk_eval(const ChannelFlags& chf, const std::string& prior_path,
                  const std::string& loss_name, const std::string& out,
                  const std::vector<std::string>& argv) {
  Stopwatch watch;
  BuiltChannel built = build_channel(chf);
  const std::string prior_raw = read_file(prior_path);
  const lfp::DiscreteDistribution prior =
      lfp::distribution_from_json(json::parse(prior_raw));

  const auto report = lfp::validate(prior, built.support);
  if (!report.ok) {
    throw std::invalid_argument(
        "prior invalid: " + report.violation +
        (report.index >= 0 ? " (atom " + std::to_string(report.index) + ")" : ""));
  }

  const lfp::BregmanLoss loss = build_loss(loss_name, built.support.dim());
  const lfp::PosteriorTable table = lfp::posterior(prior, built.channel);
  const double risk = lfp::bayes_risk(prior, built.channel, loss);

  json cfg = config_json(chf, SolveFlags{});
  cfg["prior"] = prior_path;
  cfg["loss"] = loss_name;
  ManifestInfo manifest{"risk-eval", argv, cfg, 0,
                        digest_of(cfg, prior_raw + built.input_extra)};

  json payload = lfp::to_json(table);
  payload["risk"] = risk;
  payload["manifest"] = manifest_json(manifest);
  std::cout << payload.dump(2) << '\n';

  if (!out.empty()) {
    const fs::path dir(out);
    fs::create_directories(dir);
    write_file(dir / "risk_eval.json", payload.dump(2) + "\n");
    write_manifest(dir, manifest, watch.seconds());
  }
  return kExitOk;
}

// --- grad-check ---------------------------------------------------------------

int cmd_grad_check(const ChannelFlags& chf, int atoms, std::uint64_t seed,
                   const std::string& out, const std::vector<std::string>& argv) {
  Stopwatch watch;
  BuiltChannel built = build_channel(chf);

  lfp::ProblemSpec spec{built.channel, lfp::squared_error_loss(1), built.support, {}};
  const int d = atoms > 0 ? atoms : lfp::default_atom_count(spec);

  // Random interior prior; the margin keeps central differences two-sided.
  const auto bb = built.support.bounding_box();
  const double width = bb.hi[0] - bb.lo[0];
  lfp::detail::SplitMix64 rng(lfp::detail::derive_seed(seed, 0x6c0de));
  lfp::DiscreteDistribution dist;
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    dist.points.push_back({bb.lo[0] + width * (0.02 + 0.96 * rng.uniform())});
    dist.masses.push_back(0.05 + rng.uniform());
    total += dist.masses.back();
  }
  for (double& p : dist.masses) p /= total;

  const lfp::GradCheckReport report = lfp::grad_check(dist, built.channel);

  json cfg = config_json(chf, SolveFlags{});
  cfg["d"] = d;
  cfg["seed"] = seed;
  ManifestInfo manifest{"grad-check", argv, cfg, seed,
                        digest_of(cfg, built.input_extra)};

  json payload{{"max_rel_err", report.max_rel_err},
               {"worst_entry", report.worst_entry}};
  payload["manifest"] = manifest_json(manifest);
  std::cout << payload.dump(2) << '\n';

  if (!out.empty()) {
    const fs::path dir(out);
    fs::create_directories(dir);
    write_file(dir / "grad_check.json", payload.dump(2) + "\n");
    write_manifest(dir, manifest, watch.seconds());
  }
  return report.max_rel_err <= 1e-4 ? kExitOk : kExitError;
}

// --- rerun --------------------------------------------------------------------

int cmd_rerun(const std::string& manifest_path, const std::string& out_override) {
  const json manifest = json::parse(read_file(manifest_path));
  std::vector<std::string> argv =
      manifest.at("argv").get<std::vector<std::string>>();
  if (!out_override.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
      if (argv[i] == "--out") {
        argv[i + 1] = out_override;
        replaced = true;
      }
    }
    if (!replaced) {
      argv.push_back("--out");
      argv.push_back(out_override);
    }
  }
  return run_cli(argv);
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& argv) {
  CLI::App app{"least favorable priors for finite-output channels "
               "(v" LFP_VERSION_STRING ")",
               "lfp"};
  app.require_subcommand(1);

  ChannelFlags solve_ch, sweep_ch, risk_ch, grad_ch;
  SolveFlags solve_cf, sweep_cf;

  auto* solve_cmd = app.add_subcommand("solve", "Compute a least favorable prior");
  add_channel_flags(solve_cmd, solve_ch, false);
  add_solver_flags(solve_cmd, solve_cf);

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Solve across a parameter range, emit support/pmf CSV tables");
  std::string m_range, levels_range;
  add_channel_flags(sweep_cmd, sweep_ch, true);
  sweep_cmd->add_option("--m", m_range, "Binomial m values: a..b | a,b,c | a");
  sweep_cmd->add_option("--levels", levels_range,
                        "Quantizer levels values: a..b | a,b,c | a");
  add_solver_flags(sweep_cmd, sweep_cf);

  auto* bounds_cmd = app.add_subcommand("bounds", "Cardinality bounds for (N, k, n)");
  int bN = 1, bk = 0, bn = 1;
  std::string bounds_out, bounds_format = "json";
  bounds_cmd->add_option("--N", bN, "Output alphabet size")->required();
  bounds_cmd->add_option("--k", bk, "Moment constraint count");
  bounds_cmd->add_option("--n", bn, "Input dimension");
  bounds_cmd->add_option("--out", bounds_out, "Output directory");
  bounds_cmd->add_option("--format", bounds_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* risk_cmd =
      app.add_subcommand("risk-eval", "Exact Bayes risk of a prior JSON file");
  std::string prior_path, risk_loss = "sq", risk_out;
  add_channel_flags(risk_cmd, risk_ch, false);
  risk_cmd->add_option("--prior", prior_path, "DiscreteDistribution JSON file")
      ->required();
  risk_cmd->add_option("--loss", risk_loss, "Loss: sq | gid")
      ->check(CLI::IsMember({"sq", "gid"}));
  risk_cmd->add_option("--out", risk_out, "Output directory");

  auto* grad_cmd = app.add_subcommand(
      "grad-check", "Analytic vs finite-difference gradient comparison");
  int grad_atoms = 0;
  std::uint64_t grad_seed = 0;
  std::string grad_out;
  add_channel_flags(grad_cmd, grad_ch, false);
  grad_cmd->add_option("--d", grad_atoms, "Atom count (0 = default bound)");
  grad_cmd->add_option("--seed", grad_seed, "RNG seed for the random prior");
  grad_cmd->add_option("--out", grad_out, "Output directory");

  auto* rerun_cmd =
      app.add_subcommand("rerun", "Re-execute a run recorded in a manifest");
  std::string manifest_path, rerun_out;
  rerun_cmd->add_option("manifest", manifest_path, "Path to manifest.json")
      ->required();
  rerun_cmd->add_option("--out", rerun_out, "Override the recorded --out directory");

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_ch, solve_cf, argv);
    if (*sweep_cmd) {
      return cmd_sweep(sweep_ch, sweep_cf, m_range, levels_range, argv);
    }
    if (*bounds_cmd) return cmd_bounds(bN, bk, bn, bounds_out, bounds_format, argv);
    if (*risk_cmd) {
      return cmd_risk_eval(risk_ch, prior_path, risk_loss, risk_out, argv);
    }
    if (*grad_cmd) return cmd_grad_check(grad_ch, grad_atoms, grad_seed, grad_out, argv);
    if (*rerun_cmd) return cmd_rerun(manifest_path, rerun_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}
