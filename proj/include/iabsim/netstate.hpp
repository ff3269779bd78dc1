#pragma once

// Runtime network state: per-node per-flow FIFO queues, the intermediate
// buffer cap, destination duplicate discard and per-node AoI bookkeeping.
//
// Two AoI representations are kept side by side:
//   * timestamp form: age = t - (freshest generation timestamp seen at the
//     node). This is what the scheduler reads.
//   * hop recursion: relays copy the sender's age + 1 on reception, the
//     destination takes the min over its last hops. It only matches the
//     timestamp form while no queue holds more than one packet, and exists
//     so that equivalence can be checked.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "iabsim/core.hpp"
#include "iabsim/routing.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

struct Packet {
  FlowId flow;
  std::uint8_t path{0};  // index into Flow::paths (copy k = path + 1)
  Slot generated{0};
  std::uint32_t seq{0};  // per-flow packet number, shared by both copies
};

enum class AdmissionPolicy {
  RfasGuard,       // the scheduler guarantees room; a full buffer is a bug
  DropOnFull,      // arrival at a full buffer is dropped and counted
  AdmitAndRecord,  // arrival at a full buffer is stored anyway and counted
};

enum class Admission { Admitted, Overflowed };

// What happens to queued copies once the destination has what they carry.
//   Off:        nothing, copies travel to the destination and are discarded there
//   Superseded: drop every copy with generated <= the destination watermark
//   Sibling:    drop the other copy of a packet once one copy was delivered
enum class StaleDiscard { Off, Superseded, Sibling };

inline std::string_view to_string(StaleDiscard d) {
  switch (d) {
    case StaleDiscard::Off: return "off";
    case StaleDiscard::Superseded: return "superseded";
    case StaleDiscard::Sibling: return "sibling";
  }
  return "?";
}

enum class DeliveryOutcome { Fresh, DuplicateDiscarded };

// Queue recursion: max(len + arrivals - departures, 0).
inline std::size_t apply_queue_update(std::size_t length, std::size_t arrivals,
                                      std::size_t departures) {
  if (departures > length + arrivals) return 0;
  return length + arrivals - departures;
}

struct PacketCounters {
  std::uint64_t generated{0};  // copies injected at sources
  std::uint64_t delivered{0};  // fresh deliveries at destinations
  std::uint64_t discarded{0};  // duplicates discarded, at destinations or in-network
  std::uint64_t dropped{0};    // DropOnFull losses
  std::uint64_t overflows{0};  // every arrival at a full capped buffer
};

class NetState {
 public:
  NetState(const NetworkGraph& graph, const std::vector<Flow>& flows, std::size_t buffer_cap,
           Slot start = 1)
      : nodes_(graph.node_count()),
        flows_(flows.size()),
        cap_(buffer_cap),
        capped_(nodes_, 0),
        occupancy_(nodes_, 0),
        queues_(nodes_ * flows_),
        path_counts_(nodes_ * flows_ * 2, 0),
        freshest_(nodes_ * flows_, 0),
        age_(nodes_ * flows_, start),
        hop_age_(nodes_ * flows_, start),
        watermark_(flows_, 0),
        destination_(flows_),
        source_(flows_),
        next_seq_(flows_, 0),
        delivered_seq_(flows_) {
    for (const Node& n : graph.nodes()) capped_[n.id.index()] = n.kind == NodeKind::Iab ? 1 : 0;
    for (const Flow& f : flows) {
      destination_[f.id.index()] = f.destination;
      source_[f.id.index()] = f.source;
    }
  }

  std::size_t node_count() const { return nodes_; }
  std::size_t flow_count() const { return flows_; }
  std::size_t buffer_cap() const { return cap_; }
  bool capped(NodeId n) const { return capped_[n.index()] != 0; }
  bool full(NodeId n) const { return capped(n) && occupancy_[n.index()] >= cap_; }

  std::size_t occupancy(NodeId n) const { return occupancy_[n.index()]; }
  std::size_t queue_length(NodeId n, FlowId f) const { return queues_[slot(n, f)].size(); }
  std::size_t queue_length(NodeId n, FlowId f, std::uint8_t path) const {
    return path_counts_[slot(n, f) * 2 + path];
  }
  const std::deque<Packet>& queue(NodeId n, FlowId f) const { return queues_[slot(n, f)]; }

  std::size_t total_queued() const {
    std::size_t total = 0;
    for (std::size_t o : occupancy_) total += o;
    return total;
  }

  const PacketCounters& counters() const { return counters_; }

  // One copy per configured path, all stamped with `t`, queued at the source.
  // The source age resets to zero.
  std::vector<Packet> generate_and_duplicate(const Flow& flow, Slot t) {
    std::vector<Packet> out;
    const std::uint32_t seq = next_seq_[flow.id.index()]++;
    delivered_seq_[flow.id.index()].push_back(0);
    for (std::size_t k = 0; k < flow.paths.size(); ++k) {
      Packet p{flow.id, static_cast<std::uint8_t>(k), t, seq};
      push(flow.source, p);
      out.push_back(p);
    }
    counters_.generated += out.size();
    const std::size_t i = slot(flow.source, flow.id);
    freshest_[i] = std::max(freshest_[i], t);
    age_[i] = t - freshest_[i];
    hop_age_[i] = 0;
    return out;
  }

  // Removes the oldest queued packet of `flow` assigned to `path`.
  Packet dequeue(NodeId n, FlowId f, std::uint8_t path) {
    auto& q = queues_[slot(n, f)];
    auto it = std::find_if(q.begin(), q.end(), [&](const Packet& p) { return p.path == path; });
    if (it == q.end())
      throw InvariantViolation("dequeue from an empty queue at node " + std::to_string(n.value));
    Packet p = *it;
    q.erase(it);
    --path_counts_[slot(n, f) * 2 + path];
    --occupancy_[n.index()];
    return p;
  }

  Admission admit_or_overflow(NodeId n, const Packet& p, AdmissionPolicy policy, NodeId sender) {
    if (!full(n)) {
      push(n, p);
      note_reception(n, sender, p);
      return Admission::Admitted;
    }
    switch (policy) {
      case AdmissionPolicy::RfasGuard:
        throw InvariantViolation("buffer cap exceeded at node " + std::to_string(n.value) +
                                 " under the RFAS guard");
      case AdmissionPolicy::DropOnFull:
        ++counters_.overflows;
        ++counters_.dropped;
        return Admission::Overflowed;
      case AdmissionPolicy::AdmitAndRecord:
        ++counters_.overflows;
        push(n, p);
        note_reception(n, sender, p);
        return Admission::Overflowed;
    }
    return Admission::Overflowed;
  }

  // Destination-side duplicate discard against the per-flow watermark.
  DeliveryOutcome deliver_to_destination(const Packet& p, NodeId sender) {
    Slot& mark = watermark_[p.flow.index()];
    note_reception(destination_[p.flow.index()], sender, p);
    auto& seen = delivered_seq_[p.flow.index()];
    if (p.seq >= seen.size()) seen.resize(p.seq + 1, 0);
    seen[p.seq] = 1;
    if (p.generated > mark) {
      mark = p.generated;
      ++counters_.delivered;
      return DeliveryOutcome::Fresh;
    }
    ++counters_.discarded;
    return DeliveryOutcome::DuplicateDiscarded;
  }

  // Closes slot t: every (node, flow) age moves to its slot t+1 value.
  void tick_aoi(Slot t) {
    hop_before_ = hop_age_;
    touched_.assign(nodes_ * flows_, 0);
    refreshed_.assign(nodes_ * flows_, 0);
    for (const Reception& r : pending_) {
      const std::size_t i = slot(r.rx, r.flow);
      const Slot via = hop_before_[slot(r.tx, r.flow)] + 1;
      if (r.rx == destination_[r.flow.index()]) {
        hop_age_[i] = std::min(touched_[i] ? hop_age_[i] : hop_before_[i] + 1, via);
      } else {
        hop_age_[i] = touched_[i] ? std::min(hop_age_[i], via) : via;
      }
      touched_[i] = 1;
      if (r.generated > freshest_[i]) {
        freshest_[i] = r.generated;
        refreshed_[i] = 1;
      }
    }
    for (std::size_t i = 0; i < age_.size(); ++i) {
      age_[i] = refreshed_[i] ? (t + 1) - freshest_[i] : age_[i] + 1;
      if (!touched_[i]) ++hop_age_[i];
    }
    pending_.clear();
  }

  Slot age(NodeId n, FlowId f) const { return age_[slot(n, f)]; }
  Slot hop_age(NodeId n, FlowId f) const { return hop_age_[slot(n, f)]; }
  Slot freshest(NodeId n, FlowId f) const { return freshest_[slot(n, f)]; }
  Slot watermark(FlowId f) const { return watermark_[f.index()]; }
  Slot destination_age(FlowId f) const { return age(destination_[f.index()], f); }
  NodeId destination(FlowId f) const { return destination_[f.index()]; }
  NodeId source(FlowId f) const { return source_[f.index()]; }

  // In-network discard of queued copies, counted as discarded.
  std::size_t purge_stale(StaleDiscard mode) {
    std::size_t purged = 0;
    if (mode == StaleDiscard::Off) return purged;
    const bool by_seq = mode == StaleDiscard::Sibling;
    for (std::size_t n = 0; n < nodes_; ++n) {
      for (std::size_t f = 0; f < flows_; ++f) {
        auto& q = queues_[n * flows_ + f];
        const Slot mark = watermark_[f];
        for (auto it = q.begin(); it != q.end();) {
          const auto& seen = delivered_seq_[f];
          const bool gone = by_seq ? it->seq < seen.size() && seen[it->seq] != 0 : it->generated <= mark;
          if (gone) {
            --path_counts_[(n * flows_ + f) * 2 + it->path];
            --occupancy_[n];
            ++counters_.discarded;
            ++purged;
            it = q.erase(it);
          } else {
            ++it;
          }
        }
      }
    }
    return purged;
  }

  // generated == queued + delivered + discarded + dropped
  bool conserved() const {
    const auto& c = counters_;
    return c.generated == total_queued() + c.delivered + c.discarded + c.dropped;
  }

 private:
  struct Reception {
    NodeId rx;
    NodeId tx;
    FlowId flow;
    Slot generated;
  };

  std::size_t slot(NodeId n, FlowId f) const { return n.index() * flows_ + f.index(); }

  void push(NodeId n, const Packet& p) {
    queues_[slot(n, p.flow)].push_back(p);
    ++path_counts_[slot(n, p.flow) * 2 + p.path];
    ++occupancy_[n.index()];
  }

  void note_reception(NodeId rx, NodeId tx, const Packet& p) {
    pending_.push_back({rx, tx, p.flow, p.generated});
  }

  std::size_t nodes_;
  std::size_t flows_;
  std::size_t cap_;
  std::vector<char> capped_;
  std::vector<std::size_t> occupancy_;
  std::vector<std::deque<Packet>> queues_;
  std::vector<std::size_t> path_counts_;
  std::vector<Slot> freshest_;
  std::vector<Slot> age_;
  std::vector<Slot> hop_age_;
  std::vector<Slot> watermark_;
  std::vector<NodeId> destination_;
  std::vector<NodeId> source_;
  std::vector<Reception> pending_;
  std::vector<std::uint32_t> next_seq_;
  std::vector<std::vector<char>> delivered_seq_;
  std::vector<Slot> hop_before_;
  std::vector<char> touched_;
  std::vector<char> refreshed_;
  PacketCounters counters_;
};

}  // namespace iabsim
