#pragma once

// Evaluation quantities computed from a finished run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "iabsim/engine.hpp"

namespace iabsim {

struct AoiSummary {
  std::vector<double> per_flow;  // time-average destination age per flow
  double sum{0.0};               // network objective: sum over flows
  double mean{0.0};              // mean over flows
};

inline AoiSummary average_aoi(const SimulationResult& r) {
  if (r.horizon < 1) throw Error("average_aoi needs a non-empty trace");
  AoiSummary s;
  s.per_flow.assign(r.flow_count, 0.0);
  for (Slot t = 1; t <= r.horizon; ++t)
    for (std::size_t f = 0; f < r.flow_count; ++f)
      s.per_flow[f] += static_cast<double>(r.dest_age(t, FlowId{static_cast<std::uint32_t>(f)}));
  for (double& v : s.per_flow) {
    v /= static_cast<double>(r.horizon);
    s.sum += v;
  }
  s.mean = r.flow_count ? s.sum / static_cast<double>(r.flow_count) : 0.0;
  return s;
}

// Destination age summed over flows and slots from..horizon.
inline double aoi_integral(const SimulationResult& r, Slot from) {
  if (from < 1 || from > r.horizon) throw Error("aoi_integral start outside the trace");
  double total = 0.0;
  for (Slot t = from; t <= r.horizon; ++t)
    for (std::size_t f = 0; f < r.flow_count; ++f)
      total += static_cast<double>(r.dest_age(t, FlowId{static_cast<std::uint32_t>(f)}));
  return total;
}

// Distinct (flow, timestamp) pairs that reached the destination by the end
// of the run over distinct pairs generated. Copies count once.
inline double pdr(const SimulationResult& r) {
  std::set<std::pair<std::uint32_t, Slot>> generated;
  for (const auto& g : r.generations) generated.emplace(g.flow.value, g.slot);
  if (generated.empty()) throw Error("pdr needs at least one generated packet");
  std::set<std::pair<std::uint32_t, Slot>> delivered;
  for (const auto& d : r.deliveries) delivered.emplace(d.flow.value, d.generated);
  return static_cast<double>(delivered.size()) / static_cast<double>(generated.size());
}

inline double population_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

struct ImbalanceSummary {
  std::vector<double> series;  // per-slot std across intermediate nodes
  double mean{0.0};
  double peak{0.0};
};

// Population standard deviation of total queue length across intermediate
// backhaul nodes (donor and UEs excluded), per slot and time-averaged.
inline ImbalanceSummary imbalance(const SimulationResult& r) {
  std::vector<std::size_t> intermediate;
  for (std::size_t n = 0; n < r.node_kinds.size(); ++n)
    if (r.node_kinds[n] == NodeKind::Iab) intermediate.push_back(n);
  if (intermediate.empty()) throw Error("imbalance needs at least one intermediate node");
  ImbalanceSummary s;
  std::vector<double> lengths(intermediate.size());
  for (Slot t = 1; t <= r.horizon; ++t) {
    for (std::size_t i = 0; i < intermediate.size(); ++i)
      lengths[i] = static_cast<double>(r.queue_total(t, NodeId{static_cast<std::uint32_t>(intermediate[i])}));
    double sd = population_stddev(lengths);
    s.series.push_back(sd);
    s.mean += sd;
    s.peak = std::max(s.peak, sd);
  }
  s.mean /= static_cast<double>(r.horizon);
  return s;
}

inline std::size_t overflow_count(const SimulationResult& r) { return r.overflows.size(); }

// Largest end-of-slot occupancy of any intermediate node.
inline std::size_t max_occupancy(const SimulationResult& r) {
  std::size_t peak = 0;
  for (Slot t = 1; t <= r.horizon; ++t)
    for (std::size_t n = 0; n < r.node_count; ++n)
      if (r.node_kinds[n] == NodeKind::Iab)
        peak = std::max(peak, r.queue_total(t, NodeId{static_cast<std::uint32_t>(n)}));
  return peak;
}

// Per-slot max occupancy over intermediate nodes.
inline std::vector<std::size_t> max_occupancy_series(const SimulationResult& r) {
  std::vector<std::size_t> out;
  for (Slot t = 1; t <= r.horizon; ++t) {
    std::size_t peak = 0;
    for (std::size_t n = 0; n < r.node_count; ++n)
      if (r.node_kinds[n] == NodeKind::Iab)
        peak = std::max(peak, r.queue_total(t, NodeId{static_cast<std::uint32_t>(n)}));
    out.push_back(peak);
  }
  return out;
}

// Time-average occupancy per node (all nodes, index = node id).
inline std::vector<double> mean_occupancy(const SimulationResult& r) {
  std::vector<double> out(r.node_count, 0.0);
  for (Slot t = 1; t <= r.horizon; ++t)
    for (std::size_t n = 0; n < r.node_count; ++n)
      out[n] += static_cast<double>(r.queue_total(t, NodeId{static_cast<std::uint32_t>(n)}));
  for (double& v : out) v /= static_cast<double>(r.horizon);
  return out;
}

struct MetricsSummary {
  AoiSummary aoi;
  double pdr{0.0};
  ImbalanceSummary imbalance;
  std::size_t overflow_count{0};
  std::size_t max_occupancy{0};
  // Mean over intermediate nodes of the time-average occupancy.
  double mean_occupancy{0.0};
};

inline MetricsSummary summarize(const SimulationResult& r) {
  MetricsSummary m;
  m.aoi = average_aoi(r);
  m.pdr = r.generations.empty() ? 0.0 : pdr(r);
  m.imbalance = imbalance(r);
  m.overflow_count = overflow_count(r);
  m.max_occupancy = max_occupancy(r);
  auto occ = mean_occupancy(r);
  std::size_t count = 0;
  for (std::size_t n = 0; n < r.node_count; ++n)
    if (r.node_kinds[n] == NodeKind::Iab) {
      m.mean_occupancy += occ[n];
      ++count;
    }
  if (count) m.mean_occupancy /= static_cast<double>(count);
  return m;
}

}  // namespace iabsim
