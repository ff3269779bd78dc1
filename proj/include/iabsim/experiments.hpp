#pragma once

// Multi-seed sweeps, the burst scenario and the CSV writers that form the
// output contract of the command-line tool.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "iabsim/config.hpp"
#include "iabsim/engine.hpp"
#include "iabsim/metrics.hpp"

namespace iabsim {

inline constexpr std::string_view kCsvSchemaVersion = "1";

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct SummaryRow {
  std::string scenario;
  Policy policy{Policy::RFAS};
  PathMode path_mode{PathMode::DualPath};
  double p_blk{0.0};
  std::size_t ue_count{0};
  TrafficMode traffic_mode{TrafficMode::Low};
  // Seed number for run rows, "mean" or "std" for aggregate rows.
  std::string seed;
  double mean_aoi{0.0};
  double sum_aoi{0.0};
  double pdr{0.0};
  double imbalance_mean{0.0};
  double imbalance_peak{0.0};
  double overflow_count{0.0};
  double mean_occupancy{0.0};
  double max_occupancy{0.0};
  double degraded_flows{0.0};

  bool aggregate() const { return seed == "mean" || seed == "std"; }
};

inline SummaryRow summary_row(const std::string& scenario, const ScenarioConfig& c,
                              const SimulationResult& r) {
  const MetricsSummary m = summarize(r);
  SummaryRow row;
  row.scenario = scenario;
  row.policy = c.policy;
  row.path_mode = c.path_mode;
  row.p_blk = c.p_blk;
  row.ue_count = c.ue_count;
  row.traffic_mode = c.traffic_mode;
  row.seed = std::to_string(c.seed);
  row.mean_aoi = m.aoi.mean;
  row.sum_aoi = m.aoi.sum;
  row.pdr = m.pdr;
  row.imbalance_mean = m.imbalance.mean;
  row.imbalance_peak = m.imbalance.peak;
  row.overflow_count = static_cast<double>(m.overflow_count);
  row.mean_occupancy = m.mean_occupancy;
  row.max_occupancy = static_cast<double>(m.max_occupancy);
  row.degraded_flows = static_cast<double>(r.degraded.size());
  return row;
}

// Mean and population std of each metric over a group of run rows.
inline std::pair<SummaryRow, SummaryRow> aggregate_rows(const std::vector<SummaryRow>& group) {
  if (group.empty()) throw Error("cannot aggregate an empty group");
  SummaryRow mean = group.front();
  SummaryRow sd = group.front();
  mean.seed = "mean";
  sd.seed = "std";
  using Field = double SummaryRow::*;
  const Field fields[] = {&SummaryRow::mean_aoi,        &SummaryRow::sum_aoi,
                          &SummaryRow::pdr,             &SummaryRow::imbalance_mean,
                          &SummaryRow::imbalance_peak,  &SummaryRow::overflow_count,
                          &SummaryRow::mean_occupancy,  &SummaryRow::max_occupancy,
                          &SummaryRow::degraded_flows};
  for (Field f : fields) {
    std::vector<double> xs;
    for (const auto& r : group) xs.push_back(r.*f);
    double m = 0.0;
    for (double x : xs) m += x;
    mean.*f = m / static_cast<double>(xs.size());
    sd.*f = population_stddev(xs);
  }
  return {mean, sd};
}

struct SweepCell {
  ScenarioConfig config;
  std::size_t first_run{0};  // index into SweepResult::runs
};

struct SweepResult {
  std::vector<SummaryRow> runs;        // one per (value, path mode, policy, seed)
  std::vector<SummaryRow> aggregates;  // mean then std per (value, path mode, policy)
};

// Every (sweep value, path mode, policy, seed) combination in output order.
inline std::vector<ScenarioConfig> expand_sweep(const SweepSpec& spec) {
  std::vector<ScenarioConfig> out;
  for (std::size_t v = 0; v < spec.value_count(); ++v)
    for (PathMode pm : spec.path_modes)
      for (Policy pol : spec.policies)
        for (std::uint64_t seed : spec.seeds) {
          ScenarioConfig c = spec.cell(v);
          c.path_mode = pm;
          c.policy = pol;
          c.seed = seed;
          out.push_back(c);
        }
  return out;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// is rethrown after all threads stop.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!stop) {
        const std::size_t i = next++;
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

inline SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress = {}) {
  spec.validate();
  const auto configs = expand_sweep(spec);
  SweepResult result;
  result.runs.resize(configs.size());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(configs.size(), spec.workers, [&](std::size_t i) {
    result.runs[i] = summary_row(spec.name, configs[i], run_simulation(configs[i]));
    const std::size_t d = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(d, configs.size());
    }
  });
  const std::size_t per_cell = spec.seeds.size();
  for (std::size_t i = 0; i < result.runs.size(); i += per_cell) {
    std::vector<SummaryRow> group(result.runs.begin() + static_cast<std::ptrdiff_t>(i),
                                  result.runs.begin() + static_cast<std::ptrdiff_t>(i + per_cell));
    auto [mean, sd] = aggregate_rows(group);
    result.aggregates.push_back(mean);
    result.aggregates.push_back(sd);
  }
  return result;
}

// CSV ------------------------------------------------------------------------

inline void write_summary_header(std::ostream& out) {
  out << "scenario,policy,path_mode,p_blk,ue_count,traffic_mode,seed,mean_aoi,sum_aoi,pdr,"
         "imbalance_mean,imbalance_peak,overflow_count,mean_occupancy,max_occupancy,degraded_flows\n";
}

inline void write_summary_row(std::ostream& out, const SummaryRow& r) {
  out << r.scenario << ',' << to_string(r.policy) << ',' << to_string(r.path_mode) << ','
      << fmt_num(r.p_blk) << ',' << r.ue_count << ',' << to_string(r.traffic_mode) << ',' << r.seed
      << ',' << fmt_num(r.mean_aoi) << ',' << fmt_num(r.sum_aoi) << ',' << fmt_num(r.pdr) << ','
      << fmt_num(r.imbalance_mean) << ',' << fmt_num(r.imbalance_peak) << ','
      << fmt_num(r.overflow_count) << ',' << fmt_num(r.mean_occupancy) << ','
      << fmt_num(r.max_occupancy) << ',' << fmt_num(r.degraded_flows) << '\n';
}

inline void write_summary_csv(std::ostream& out, const SweepResult& result) {
  write_summary_header(out);
  for (const auto& r : result.runs) write_summary_row(out, r);
  for (const auto& r : result.aggregates) write_summary_row(out, r);
}

inline void write_topology_csv(std::ostream& out, const NetworkGraph& graph) {
  out << "record,id,kind,x,y,tx,rx\n";
  for (const Node& n : graph.nodes())
    out << "node," << n.id.value << ',' << to_string(n.kind) << ',' << fmt_num(n.position.x) << ','
        << fmt_num(n.position.y) << ",,\n";
  for (std::size_t i = 0; i < graph.link_count(); ++i) {
    const DirectedLink& l = graph.link(LinkId{static_cast<std::uint32_t>(i)});
    out << "link," << i << ",,,," << l.tx.value << ',' << l.rx.value << '\n';
  }
}

inline void write_paths_csv(std::ostream& out, const std::vector<Flow>& flows) {
  out << "flow,source,path_index,hops,nodes\n";
  for (const Flow& f : flows)
    for (std::size_t k = 0; k < f.paths.size(); ++k) {
      out << f.id.value << ',' << f.source.value << ',' << k << ',' << f.paths[k].hops() << ',';
      for (std::size_t i = 0; i < f.paths[k].nodes.size(); ++i)
        out << (i ? " " : "") << f.paths[k].nodes[i].value;
      out << '\n';
    }
}

inline void write_aoi_trace_header(std::ostream& out) { out << "policy,seed,slot,flow,aoi\n"; }

inline void write_aoi_trace(std::ostream& out, const SimulationResult& r, std::uint64_t seed) {
  for (Slot t = 1; t <= r.horizon; ++t)
    for (std::size_t f = 0; f < r.flow_count; ++f)
      out << to_string(r.policy) << ',' << seed << ',' << t << ',' << f << ','
          << r.dest_age(t, FlowId{static_cast<std::uint32_t>(f)}) << '\n';
}

inline void write_queue_trace_header(std::ostream& out) { out << "policy,seed,slot,node,kind,occupancy\n"; }

inline void write_queue_trace(std::ostream& out, const SimulationResult& r, std::uint64_t seed) {
  for (Slot t = 1; t <= r.horizon; ++t)
    for (std::size_t n = 0; n < r.node_count; ++n)
      out << to_string(r.policy) << ',' << seed << ',' << t << ',' << n << ','
          << to_string(r.node_kinds[n]) << ',' << r.queue_total(t, NodeId{static_cast<std::uint32_t>(n)})
          << '\n';
}

inline void write_state_trace(std::ostream& out, const SimulationResult& r) {
  out << "slot,node,flow,queue_len,aoi\n";
  for (const auto& s : r.state)
    out << s.slot << ',' << s.node.value << ',' << s.flow.value << ',' << s.queue_length << ',' << s.age << '\n';
}

inline void write_channel_trace(std::ostream& out, const SimulationResult& r) {
  out << "slot,link,state\n";
  for (std::size_t t = 0; t < r.channel_trace.size(); ++t)
    for (std::size_t l = 0; l < r.channel_trace[t].size(); ++l)
      out << t + 1 << ',' << l << ',' << (r.channel_trace[t][l] == LinkState::LoS ? "los" : "blocked") << '\n';
}

inline void write_activation_trace(std::ostream& out, const SimulationResult& r) {
  out << "slot,link,flow,weight\n";
  for (const auto& a : r.activations)
    out << a.slot << ',' << a.link.value << ',' << a.flow.value << ',' << fmt_num(a.weight) << '\n';
}

// Burst scenario -------------------------------------------------------------

struct BurstRun {
  Policy policy{Policy::RFAS};
  SimulationResult result;
  SummaryRow summary;
  double post_burst_aoi{0.0};  // destination AoI summed over flows and slots >= burst_slot
  std::size_t peak_queue{0};   // largest intermediate-node occupancy
};

struct BurstScenarioResult {
  ScenarioConfig config;
  std::vector<BurstRun> runs;  // QAS, FAS, RFAS order

  const BurstRun& of(Policy p) const {
    for (const auto& r : runs)
      if (r.policy == p) return r;
    throw Error("policy missing from burst result");
  }
};

// QAS, FAS and RFAS on one topology and one channel seed.
inline BurstScenarioResult run_burst_scenario(ScenarioConfig config, const std::string& scenario = "burst") {
  config.traffic_mode = TrafficMode::Burst;
  config.validate();
  BurstScenarioResult out;
  out.config = config;
  for (Policy p : {Policy::QAS, Policy::FAS, Policy::RFAS}) {
    ScenarioConfig c = config;
    c.policy = p;
    BurstRun run;
    run.policy = p;
    run.result = run_simulation(c);
    run.summary = summary_row(scenario, c, run.result);
    run.post_burst_aoi = aoi_integral(run.result, c.burst_slot);
    run.peak_queue = max_occupancy(run.result);
    out.runs.push_back(std::move(run));
  }
  return out;
}

}  // namespace iabsim
