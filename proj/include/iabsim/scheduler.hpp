#pragma once

// Per-slot link activation. Candidate (link, flow) pairs get a policy weight
// and are fed to the greedy conflict-free selector; exact_mwis is the
// exhaustive reference used to bound the greedy result in tests.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "iabsim/channel.hpp"
#include "iabsim/core.hpp"
#include "iabsim/netstate.hpp"
#include "iabsim/routing.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

enum class Policy { RFAS, QAS, FAS };
enum class CsiMode { Genie, Blind };

inline std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::RFAS: return "RFAS";
    case Policy::QAS: return "QAS";
    case Policy::FAS: return "FAS";
  }
  return "?";
}

inline std::string_view to_string(CsiMode m) { return m == CsiMode::Genie ? "genie" : "blind"; }

struct PolicyConfig {
  Policy policy{Policy::RFAS};
  double gamma{0.5};
  CsiMode csi_mode{CsiMode::Genie};
};

// Buffer semantics each policy runs under.
inline AdmissionPolicy admission_for(Policy p) {
  switch (p) {
    case Policy::RFAS: return AdmissionPolicy::RfasGuard;
    case Policy::QAS: return AdmissionPolicy::DropOnFull;
    case Policy::FAS: return AdmissionPolicy::AdmitAndRecord;
  }
  return AdmissionPolicy::DropOnFull;
}

inline constexpr double kBlockedWeight = -std::numeric_limits<double>::infinity();

inline double weight_rfas(double q_tail, double q_head, double dest_age, double gamma) {
  return gamma * (q_tail - q_head) + dest_age;
}

inline double weight_qas(double q_tail, double q_head, double gamma) {
  return gamma * (q_tail - q_head);
}

inline double weight_fas(double dest_age) { return dest_age; }

struct Candidate {
  LinkId link;
  FlowId flow;
  std::uint8_t path{0};
  double weight{0.0};
};

// Descending weight, then ascending link id, then ascending flow id.
inline bool schedule_order(const Candidate& a, const Candidate& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.link != b.link) return a.link < b.link;
  return a.flow < b.flow;
}

struct Schedule {
  std::vector<Candidate> activations;

  double total_weight() const {
    double w = 0.0;
    for (const Candidate& c : activations) w += c.weight;
    return w;
  }
  std::size_t size() const { return activations.size(); }
  bool empty() const { return activations.empty(); }
};

// Positive-weight candidates for the slot. A (link, flow) pair qualifies
// when the link lies on one of the flow's paths and the tail holds a packet
// of that path. Under Genie CSI blocked links are skipped; under RFAS links
// into a full capped buffer are skipped (weight -inf).
inline std::vector<Candidate> enumerate_candidates(const std::vector<Flow>& flows,
                                                   const NetState& state,
                                                   const ChannelState& channel,
                                                   const PolicyConfig& config) {
  std::vector<Candidate> out;
  for (const Flow& flow : flows) {
    const double dest_age = static_cast<double>(state.destination_age(flow.id));
    for (std::size_t k = 0; k < flow.paths.size(); ++k) {
      const auto& nodes = flow.paths[k].nodes;
      const auto& links = flow.path_links[k];
      for (std::size_t h = 0; h < links.size(); ++h) {
        const NodeId tail = nodes[h];
        const NodeId head = nodes[h + 1];
        if (state.queue_length(tail, flow.id, static_cast<std::uint8_t>(k)) == 0) continue;
        if (config.csi_mode == CsiMode::Genie && !is_available(links[h], channel)) continue;

        const double q_tail = static_cast<double>(state.queue_length(tail, flow.id));
        const double q_head = head == flow.destination ? 0.0 : static_cast<double>(state.queue_length(head, flow.id));
        double w = 0.0;
        switch (config.policy) {
          case Policy::RFAS:
            w = state.full(head) ? kBlockedWeight : weight_rfas(q_tail, q_head, dest_age, config.gamma);
            break;
          case Policy::QAS: w = weight_qas(q_tail, q_head, config.gamma); break;
          case Policy::FAS: w = weight_fas(dest_age); break;
        }
        if (w > 0.0) out.push_back({links[h], flow.id, static_cast<std::uint8_t>(k), w});
      }
    }
  }
  return out;
}

// Greedy selection with an avoidance set: walk candidates by descending
// weight, activate when the link is not yet avoided, then avoid the link and
// everything it conflicts with.
inline Schedule greedy_mwis(std::vector<Candidate> candidates, const ConflictSets& conflicts) {
  std::sort(candidates.begin(), candidates.end(), schedule_order);
  std::vector<char> avoid(conflicts.size(), 0);
  Schedule schedule;
  for (const Candidate& c : candidates) {
    if (!(c.weight > 0.0) || avoid[c.link.index()]) continue;
    schedule.activations.push_back(c);
    avoid[c.link.index()] = 1;
    for (LinkId other : conflicts.of(c.link)) avoid[other.index()] = 1;
  }
  return schedule;
}

inline bool compatible(const Candidate& a, const Candidate& b, const ConflictSets& conflicts) {
  return a.link != b.link && !conflicts.conflicts(a.link, b.link);
}

inline constexpr std::size_t kExactMwisLimit = 20;

// Exhaustive maximum-weight independent set. Ties go to the
// lexicographically smallest (link, flow) activation sequence.
inline Schedule exact_mwis(const std::vector<Candidate>& candidates, const ConflictSets& conflicts) {
  const std::size_t n = candidates.size();
  if (n > kExactMwisLimit) throw Error("exact_mwis supports at most 20 candidates");
  std::vector<Candidate> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), [](const Candidate& a, const Candidate& b) {
    return a.link != b.link ? a.link < b.link : a.flow < b.flow;
  });

  std::vector<std::uint32_t> compat(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && compatible(sorted[i], sorted[j], conflicts)) compat[i] |= 1u << j;

  auto key = [&](std::uint32_t mask) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> k;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) k.emplace_back(sorted[i].link.value, sorted[i].flow.value);
    return k;
  };

  std::uint32_t best = 0;
  double best_weight = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool independent = true;
    double w = 0.0;
    for (std::size_t i = 0; i < n && independent; ++i) {
      if (!(mask >> i & 1u)) continue;
      if ((mask & ~(1u << i) & ~compat[i]) != 0) independent = false;
      w += sorted[i].weight;
    }
    if (!independent) continue;
    if (w > best_weight || (w == best_weight && best != 0 && key(mask) < key(best))) {
      best = mask;
      best_weight = w;
    }
  }
  Schedule schedule;
  for (std::size_t i = 0; i < n; ++i)
    if (best >> i & 1u) schedule.activations.push_back(sorted[i]);
  return schedule;
}

// No two activations share a link or sit in each other's conflict sets.
inline bool is_independent(const Schedule& s, const ConflictSets& conflicts) {
  for (std::size_t i = 0; i < s.activations.size(); ++i)
    for (std::size_t j = i + 1; j < s.activations.size(); ++j)
      if (!compatible(s.activations[i], s.activations[j], conflicts)) return false;
  return true;
}

// No positive-weight candidate could be added without breaking independence.
inline bool is_maximal(const Schedule& s, const std::vector<Candidate>& candidates,
                       const ConflictSets& conflicts) {
  for (const Candidate& c : candidates) {
    if (!(c.weight > 0.0)) continue;
    bool chosen = false;
    bool blocked = false;
    for (const Candidate& a : s.activations) {
      if (a.link == c.link && a.flow == c.flow) chosen = true;
      if (!compatible(a, c, conflicts)) blocked = true;
    }
    if (!chosen && !blocked) return false;
  }
  return true;
}

}  // namespace iabsim
