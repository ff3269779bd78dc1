// Command-line driver: single runs, sweeps, the burst scenario and topology
// dumps, all configured from a flat key = value file.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "iabsim.hpp"

namespace fs = std::filesystem;
using namespace iabsim;

namespace {

struct Options {
  std::string config;
  std::string out_dir{"out"};
  std::string seeds;
  std::string policy;
  std::size_t workers{0};
  bool quiet{false};
  bool verbose{false};
  bool trace_state{false};
  bool trace_channel{false};
  bool trace_activations{false};
};

std::ofstream open_out(const Options& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  const auto path = fs::path(o.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void say(const Options& o, const std::string& msg) {
  if (!o.quiet) std::cerr << msg << '\n';
}

SweepSpec load(const Options& o) {
  SweepSpec spec = o.config.empty() ? parse_config_text("", "<defaults>") : parse_config(o.config);
  if (!o.seeds.empty()) spec.seeds = parse::to_uint_list(o.seeds);
  if (!o.policy.empty()) {
    spec.policies = parse::map_list<Policy>(o.policy, parse::to_policy);
    spec.base.policy = spec.policies.front();
  }
  if (o.workers > 0) spec.workers = o.workers;
  spec.validate();
  return spec;
}

void dump_topology(const Options& o, const ScenarioConfig& c) {
  Scenario s = build_scenario(c);
  auto topo = open_out(o, "topology.csv");
  write_topology_csv(topo, s.graph);
  auto paths = open_out(o, "paths.csv");
  write_paths_csv(paths, s.flows);
  if (!s.degraded.empty()) say(o, "warning: " + std::to_string(s.degraded.size()) + " flow(s) fell back to a single path");
}

int cmd_run(const Options& o) {
  SweepSpec spec = load(o);
  ScenarioConfig c = spec.base;
  if (!o.seeds.empty()) c.seed = spec.seeds.front();
  Scenario scenario = build_scenario(c);
  SimOptions opts = SimOptions::from(c);
  opts.record_state = o.trace_state;
  opts.record_channel = o.trace_channel;
  opts.record_activations = o.trace_activations;
  SimulationResult r = run_simulation(scenario, opts);

  auto summary = open_out(o, "summary.csv");
  write_summary_header(summary);
  SummaryRow row = summary_row(spec.name, c, r);
  write_summary_row(summary, row);
  auto aoi = open_out(o, "trace_aoi.csv");
  write_aoi_trace_header(aoi);
  write_aoi_trace(aoi, r, c.seed);
  auto queue = open_out(o, "trace_queue.csv");
  write_queue_trace_header(queue);
  write_queue_trace(queue, r, c.seed);
  if (o.trace_state) {
    auto f = open_out(o, "trace_state.csv");
    write_state_trace(f, r);
  }
  if (o.trace_channel) {
    auto f = open_out(o, "trace_channel.csv");
    write_channel_trace(f, r);
  }
  if (o.trace_activations) {
    auto f = open_out(o, "trace_activations.csv");
    write_activation_trace(f, r);
  }
  dump_topology(o, c);
  say(o, std::string(to_string(c.policy)) + " seed " + std::to_string(c.seed) + ": mean AoI " +
             fmt_num(row.mean_aoi) + ", PDR " + fmt_num(row.pdr) + ", overflows " +
             fmt_num(row.overflow_count));
  return 0;
}

int cmd_sweep(const Options& o) {
  SweepSpec spec = load(o);
  const std::size_t total = expand_sweep(spec).size();
  say(o, spec.name + ": " + std::to_string(total) + " runs on " + std::to_string(spec.workers) + " worker(s)");
  ProgressFn progress;
  if (o.verbose)
    progress = [](std::size_t done, std::size_t all) { std::cerr << "  " << done << "/" << all << '\n'; };
  SweepResult result = run_sweep(spec, progress);
  auto out = open_out(o, "summary.csv");
  write_summary_csv(out, result);
  if (!o.quiet)
    for (const auto& a : result.aggregates)
      if (a.seed == "mean")
        std::cerr << "  " << to_string(a.policy) << ' ' << to_string(a.path_mode) << " p_blk=" << fmt_num(a.p_blk)
                  << " ue=" << a.ue_count << ' ' << to_string(a.traffic_mode) << ": AoI " << fmt_num(a.mean_aoi)
                  << " PDR " << fmt_num(a.pdr) << " imbalance " << fmt_num(a.imbalance_mean) << '\n';
  return 0;
}

int cmd_burst(const Options& o) {
  SweepSpec spec = load(o);
  auto summary = open_out(o, "summary.csv");
  auto aoi = open_out(o, "trace_aoi.csv");
  auto queue = open_out(o, "trace_queue.csv");
  write_summary_header(summary);
  write_aoi_trace_header(aoi);
  write_queue_trace_header(queue);
  std::vector<std::vector<SummaryRow>> per_policy(3);
  for (std::uint64_t seed : spec.seeds) {
    ScenarioConfig c = spec.base;
    c.seed = seed;
    BurstScenarioResult b = run_burst_scenario(c, spec.name);
    for (std::size_t i = 0; i < b.runs.size(); ++i) {
      const BurstRun& run = b.runs[i];
      write_summary_row(summary, run.summary);
      write_aoi_trace(aoi, run.result, seed);
      write_queue_trace(queue, run.result, seed);
      per_policy[i].push_back(run.summary);
    }
    if (o.verbose)
      std::cerr << "  seed " << seed << ": post-burst AoI QAS " << fmt_num(b.of(Policy::QAS).post_burst_aoi)
                << " FAS " << fmt_num(b.of(Policy::FAS).post_burst_aoi) << " RFAS "
                << fmt_num(b.of(Policy::RFAS).post_burst_aoi) << ", peak queue FAS "
                << b.of(Policy::FAS).peak_queue << " RFAS " << b.of(Policy::RFAS).peak_queue << '\n';
  }
  for (const auto& group : per_policy) {
    auto [mean, sd] = aggregate_rows(group);
    write_summary_row(summary, mean);
    write_summary_row(summary, sd);
  }
  ScenarioConfig c = spec.base;
  c.traffic_mode = TrafficMode::Burst;
  c.seed = spec.seeds.front();
  dump_topology(o, c);
  say(o, "burst: " + std::to_string(spec.seeds.size()) + " seed(s) written to " + o.out_dir);
  return 0;
}

int cmd_topology(const Options& o) {
  SweepSpec spec = load(o);
  ScenarioConfig c = spec.base;
  if (!o.seeds.empty()) c.seed = spec.seeds.front();
  dump_topology(o, c);
  say(o, "topology written to " + o.out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-hop IAB network simulator with packet duplication and AoI-aware scheduling"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress output");
  app.add_flag("-v,--verbose", o.verbose, "Per-run progress");

  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "Config file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("-s,--seeds", o.seeds, "Seed list override, e.g. 1..10 or 3,7");
    sub->add_option("-p,--policy", o.policy, "Policy override: rfas, qas, fas (comma list for sweeps)");
  };
  auto* run = app.add_subcommand("run", "Run one scenario and write traces");
  common(run);
  run->add_flag("--trace-state", o.trace_state, "Write trace_state.csv");
  run->add_flag("--trace-channel", o.trace_channel, "Write trace_channel.csv");
  run->add_flag("--trace-activations", o.trace_activations, "Write trace_activations.csv");
  auto* sweep = app.add_subcommand("sweep", "Run a multi-seed sweep and write summary.csv");
  common(sweep);
  sweep->add_option("-j,--workers", o.workers, "Parallel runs (overrides the config)");
  auto* burst = app.add_subcommand("burst", "Run the burst scenario for QAS, FAS and RFAS");
  common(burst);
  auto* topo = app.add_subcommand("topology", "Write topology.csv and paths.csv");
  common(topo);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*burst) return cmd_burst(o);
    if (*topo) return cmd_topology(o);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
