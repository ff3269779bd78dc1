#pragma once

// Slotted simulation loop. Each slot runs, in order: traffic generation,
// channel step, candidate enumeration and greedy selection, transfer of one
// head-of-line packet per activation, admission / destination delivery, AoI
// tick, in-network duplicate discard and trace recording.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iabsim/channel.hpp"
#include "iabsim/core.hpp"
#include "iabsim/netstate.hpp"
#include "iabsim/routing.hpp"
#include "iabsim/scheduler.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

enum class TrafficMode { High, Low, Mixed, Burst };

inline std::string_view to_string(TrafficMode m) {
  switch (m) {
    case TrafficMode::High: return "high";
    case TrafficMode::Low: return "low";
    case TrafficMode::Mixed: return "mixed";
    case TrafficMode::Burst: return "burst";
  }
  return "?";
}

inline std::string_view to_string(PathMode m) { return m == PathMode::DualPath ? "dual" : "single"; }

inline constexpr Slot kHighPeriod = 10;
inline constexpr Slot kLowPeriod = 50;

struct ScenarioConfig {
  Slot horizon{10000};
  std::size_t rows{5};
  std::size_t cols{5};
  double spacing{200.0};
  std::optional<GridIndex> donor_cell;  // grid center when unset
  std::size_t ue_count{8};
  TrafficMode traffic_mode{TrafficMode::Low};
  Slot burst_slot{20};
  std::size_t burst_size{6};
  double p_blk{0.15};
  double block_duration{100.0};
  double gamma{0.5};
  std::size_t buffer_cap{8};
  double interference_range{100.0};
  Policy policy{Policy::RFAS};
  PathMode path_mode{PathMode::DualPath};
  CsiMode csi_mode{CsiMode::Genie};
  std::size_t k_max{32};
  StaleDiscard stale_discard{StaleDiscard::Sibling};
  std::uint64_t seed{1};

  GridIndex donor() const { return donor_cell.value_or(center_cell(rows, cols)); }

  void validate() const {
    if (horizon < 1) throw ConfigError("horizon must be at least 1 slot");
    if (rows == 0 || cols == 0) throw ConfigError("grid needs at least one row and one column");
    if (!(spacing > 0.0)) throw ConfigError("spacing must be positive");
    if (!(p_blk >= 0.0 && p_blk < 1.0)) throw ConfigError("p_blk must lie in [0, 1)");
    if (!(block_duration >= 1.0)) throw ConfigError("block_duration must be at least 1");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (buffer_cap == 0) throw ConfigError("buffer_cap must be at least 1");
    if (!(interference_range >= 0.0)) throw ConfigError("interference_range must be non-negative");
    if (traffic_mode == TrafficMode::Burst && (burst_slot < 1 || burst_slot >= horizon))
      throw ConfigError("burst_slot must lie in [1, horizon)");
    if (k_max < 2) throw ConfigError("k_max must be at least 2");
    auto d = donor();
    if (d.row >= rows || d.col >= cols) throw ConfigError("donor cell outside the grid");
  }
};

// Periods per flow id. Mixed: even ids fast, odd ids slow. Burst rides on
// low-rate background traffic.
inline std::vector<Slot> generation_periods(TrafficMode mode, std::size_t flows) {
  std::vector<Slot> periods(flows);
  for (std::size_t i = 0; i < flows; ++i) {
    switch (mode) {
      case TrafficMode::High: periods[i] = kHighPeriod; break;
      case TrafficMode::Low:
      case TrafficMode::Burst: periods[i] = kLowPeriod; break;
      case TrafficMode::Mixed: periods[i] = i % 2 == 0 ? kHighPeriod : kLowPeriod; break;
    }
  }
  return periods;
}

struct TrafficSpec {
  bool burst{false};
  Slot burst_slot{20};
  std::size_t burst_size{0};
};

struct GenerationEvent {
  FlowId flow;
  std::size_t packets{0};  // distinct packets (each duplicated per path)
};

// Flows generate at positive multiples of their period; a burst adds
// burst_size packets per flow at burst_slot.
inline std::vector<GenerationEvent> generate_traffic(const std::vector<Flow>& flows, Slot t,
                                                     const TrafficSpec& traffic) {
  std::vector<GenerationEvent> events;
  for (const Flow& f : flows) {
    std::size_t n = (f.generation_period > 0 && t > 0 && t % f.generation_period == 0) ? 1 : 0;
    if (traffic.burst && t == traffic.burst_slot) n += traffic.burst_size;
    if (n > 0) events.push_back({f.id, n});
  }
  return events;
}

// Immutable part of a run: topology, conflict graph and configured flows.
struct Scenario {
  NetworkGraph graph;
  ConflictSets conflicts;
  std::vector<Flow> flows;
  std::vector<FlowId> degraded;  // dual-path flows that fell back to one path
};

inline Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario s;
  s.graph = build_grid_topology(config.rows, config.cols, config.spacing, config.donor());
  Rng placement(config.seed, streams::kPlacement);
  place_ues(s.graph, config.ue_count, placement);
  s.conflicts = build_conflict_sets(s.graph, config.interference_range);
  auto report = configure_flows(s.graph, config.path_mode,
                                generation_periods(config.traffic_mode, config.ue_count), config.k_max);
  s.flows = std::move(report.flows);
  s.degraded = std::move(report.degraded);
  return s;
}

struct SimOptions {
  Slot horizon{10000};
  PolicyConfig policy;
  std::size_t buffer_cap{8};
  ChannelParams channel;
  TrafficSpec traffic;
  std::uint64_t seed{1};
  bool record_activations{false};
  bool record_transfers{false};
  bool record_state{false};
  bool record_channel{false};
  StaleDiscard stale_discard{StaleDiscard::Sibling};

  static SimOptions from(const ScenarioConfig& c) {
    SimOptions o;
    o.horizon = c.horizon;
    o.policy = {c.policy, c.gamma, c.csi_mode};
    o.buffer_cap = c.buffer_cap;
    o.channel = derive_transition_probs(c.p_blk, c.block_duration);
    o.traffic = {c.traffic_mode == TrafficMode::Burst, c.burst_slot,
                 c.traffic_mode == TrafficMode::Burst ? c.burst_size : 0};
    o.seed = c.seed;
    o.stale_discard = c.stale_discard;
    return o;
  }
};

struct ActivationRecord {
  Slot slot;
  LinkId link;
  FlowId flow;
  double weight;
};

struct TransferRecord {
  Slot slot;
  LinkId link;
  Packet packet;
};

struct GenerationRecord {
  Slot slot;
  FlowId flow;
  std::size_t copies;
};

struct DeliveryRecord {
  Slot slot;
  FlowId flow;
  Slot generated;
  bool fresh;
};

struct OverflowRecord {
  Slot slot;
  NodeId node;
  FlowId flow;
  bool dropped;
};

struct StateRecord {
  Slot slot;
  NodeId node;
  FlowId flow;
  std::size_t queue_length;
  Slot age;
};

struct SimulationResult {
  Slot horizon{0};
  std::size_t flow_count{0};
  std::size_t node_count{0};
  std::vector<NodeKind> node_kinds;
  std::size_t buffer_cap{0};
  Policy policy{Policy::RFAS};

  // dest_aoi[(t-1) * flow_count + f] = destination age at the start of slot t.
  std::vector<Slot> dest_aoi;
  // queue_totals[(t-1) * node_count + n] = occupancy of n at the end of slot t.
  std::vector<std::size_t> queue_totals;

  std::vector<GenerationRecord> generations;
  std::vector<DeliveryRecord> deliveries;
  std::vector<OverflowRecord> overflows;
  std::vector<ActivationRecord> activations;  // optional
  std::vector<TransferRecord> transfers;      // optional
  std::vector<StateRecord> state;             // optional
  std::vector<std::vector<LinkState>> channel_trace;  // optional
  std::vector<FlowId> degraded;

  Slot dest_age(Slot t, FlowId f) const { return dest_aoi[(t - 1) * flow_count + f.index()]; }
  std::size_t queue_total(Slot t, NodeId n) const {
    return queue_totals[(t - 1) * node_count + n.index()];
  }
};

struct TransferLog {
  std::vector<TransferRecord> moved;
  std::vector<OverflowRecord> overflows;
  std::vector<DeliveryRecord> deliveries;
};

// Moves one packet per activation. All departures happen before any
// arrival so no packet advances more than one hop per slot. Activations on
// blocked links (Blind CSI) fail silently and leave the packet queued.
inline TransferLog transfer_packets(const Schedule& schedule, NetState& state,
                                    const NetworkGraph& graph, const std::vector<Flow>& flows,
                                    const ChannelState& channel, AdmissionPolicy admission, Slot t) {
  TransferLog log;
  struct InFlight {
    LinkId link;
    Packet packet;
  };
  std::vector<InFlight> moving;
  for (const Candidate& a : schedule.activations) {
    if (!is_available(a.link, channel)) continue;
    const NodeId tail = graph.link(a.link).tx;
    if (state.queue_length(tail, a.flow, a.path) == 0)
      throw InvariantViolation("activation on an empty queue at node " + std::to_string(tail.value));
    moving.push_back({a.link, state.dequeue(tail, a.flow, a.path)});
  }
  for (const InFlight& m : moving) {
    const DirectedLink& l = graph.link(m.link);
    const Flow& flow = flows[m.packet.flow.index()];
    log.moved.push_back({t, m.link, m.packet});
    if (l.rx == flow.destination) {
      auto outcome = state.deliver_to_destination(m.packet, l.tx);
      log.deliveries.push_back({t, flow.id, m.packet.generated, outcome == DeliveryOutcome::Fresh});
    } else {
      auto adm = state.admit_or_overflow(l.rx, m.packet, admission, l.tx);
      if (adm == Admission::Overflowed)
        log.overflows.push_back({t, l.rx, flow.id, admission == AdmissionPolicy::DropOnFull});
    }
  }
  return log;
}

class Simulator {
 public:
  Simulator(const Scenario& scenario, SimOptions options)
      : scenario_(scenario),
        options_(options),
        state_(scenario.graph, scenario.flows, options.buffer_cap, 1),
        channel_rng_(options.seed, streams::kChannel),
        channel_(stationary_channel_state(scenario.graph.link_count(), options.channel, channel_rng_)) {
    if (options_.horizon < 1) throw ConfigError("horizon must be at least 1 slot");
    result_.horizon = options_.horizon;
    result_.flow_count = scenario.flows.size();
    result_.node_count = scenario.graph.node_count();
    result_.buffer_cap = options_.buffer_cap;
    result_.policy = options_.policy.policy;
    result_.degraded = scenario.degraded;
    for (const Node& n : scenario.graph.nodes()) result_.node_kinds.push_back(n.kind);
    result_.dest_aoi.reserve(static_cast<std::size_t>(options_.horizon) * result_.flow_count);
    result_.queue_totals.reserve(static_cast<std::size_t>(options_.horizon) * result_.node_count);
  }

  Slot now() const { return t_; }
  bool done() const { return t_ > options_.horizon; }
  const NetState& state() const { return state_; }
  const ChannelState& channel() const { return channel_; }
  const Schedule& last_schedule() const { return schedule_; }
  const std::vector<Candidate>& last_candidates() const { return candidates_; }
  const TransferLog& last_transfers() const { return transfers_; }

  void step() {
    if (done()) throw Error("simulation horizon exhausted");
    const Slot t = t_;
    const auto& flows = scenario_.flows;

    for (std::size_t f = 0; f < flows.size(); ++f)
      result_.dest_aoi.push_back(state_.destination_age(flows[f].id));

    for (const GenerationEvent& e : generate_traffic(flows, t, options_.traffic)) {
      const Flow& flow = flows[e.flow.index()];
      for (std::size_t i = 0; i < e.packets; ++i) state_.generate_and_duplicate(flow, t);
      result_.generations.push_back({t, e.flow, e.packets * flow.paths.size()});
    }

    step_channels(channel_, options_.channel, channel_rng_);
    if (options_.record_channel) result_.channel_trace.push_back(channel_.links);

    candidates_ = enumerate_candidates(flows, state_, channel_, options_.policy);
    schedule_ = greedy_mwis(candidates_, scenario_.conflicts);
    if (!is_independent(schedule_, scenario_.conflicts))
      throw InvariantViolation("schedule is not an independent set at slot " + std::to_string(t));
    if (options_.record_activations)
      for (const Candidate& a : schedule_.activations)
        result_.activations.push_back({t, a.link, a.flow, a.weight});

    transfers_ = transfer_packets(schedule_, state_, scenario_.graph, flows, channel_,
                                  admission_for(options_.policy.policy), t);
    if (options_.record_transfers)
      result_.transfers.insert(result_.transfers.end(), transfers_.moved.begin(), transfers_.moved.end());
    result_.deliveries.insert(result_.deliveries.end(), transfers_.deliveries.begin(), transfers_.deliveries.end());
    result_.overflows.insert(result_.overflows.end(), transfers_.overflows.begin(), transfers_.overflows.end());

    state_.tick_aoi(t);
    state_.purge_stale(options_.stale_discard);

    if (!state_.conserved())
      throw InvariantViolation("packet conservation broken at slot " + std::to_string(t));
    for (const Node& n : scenario_.graph.nodes()) {
      const std::size_t occ = state_.occupancy(n.id);
      result_.queue_totals.push_back(occ);
      if (options_.policy.policy == Policy::RFAS && state_.capped(n.id) && occ > options_.buffer_cap)
        throw InvariantViolation("RFAS buffer cap exceeded at node " + std::to_string(n.id.value));
    }
    if (options_.record_state)
      for (const Node& n : scenario_.graph.nodes())
        for (const Flow& f : flows)
          result_.state.push_back({t, n.id, f.id, state_.queue_length(n.id, f.id), state_.age(n.id, f.id)});
    ++t_;
  }

  SimulationResult run() {
    while (!done()) step();
    return result_;
  }

  const SimulationResult& partial_result() const { return result_; }

 private:
  const Scenario& scenario_;
  SimOptions options_;
  NetState state_;
  Rng channel_rng_;
  ChannelState channel_;
  Slot t_{1};
  std::vector<Candidate> candidates_;
  Schedule schedule_;
  TransferLog transfers_;
  SimulationResult result_;
};

inline SimulationResult run_simulation(const Scenario& scenario, const SimOptions& options) {
  Simulator sim(scenario, options);
  return sim.run();
}

inline SimulationResult run_simulation(const ScenarioConfig& config) {
  Scenario scenario = build_scenario(config);
  return run_simulation(scenario, SimOptions::from(config));
}

}  // namespace iabsim
