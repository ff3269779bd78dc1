#pragma once

// Offline routing: hop-count k-shortest simple paths (Yen) and selection of
// an internally node-disjoint pair per flow, plus the two route validators.

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "iabsim/core.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

struct Path {
  std::vector<NodeId> nodes;

  std::size_t hops() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  NodeId source() const { return nodes.front(); }
  NodeId destination() const { return nodes.back(); }

  friend bool operator==(const Path&, const Path&) = default;
};

// Shortest first, then lexicographic on the node sequence.
struct PathOrder {
  bool operator()(const Path& a, const Path& b) const {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.nodes < b.nodes;
  }
};

struct Flow {
  FlowId id;
  NodeId source;
  NodeId destination{kDonor};
  Slot generation_period{10};
  std::vector<Path> paths;
  // paths[k] resolved to link ids; filled by resolve_links().
  std::vector<std::vector<LinkId>> path_links;

  bool dual() const { return paths.size() == 2; }
};

inline std::vector<LinkId> links_of(const NetworkGraph& graph, const Path& path) {
  std::vector<LinkId> out;
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    auto l = graph.find_link(path.nodes[i], path.nodes[i + 1]);
    if (!l) throw NoRoute("path uses a link that does not exist");
    out.push_back(*l);
  }
  return out;
}

inline void resolve_links(const NetworkGraph& graph, Flow& flow) {
  flow.path_links.clear();
  for (const Path& p : flow.paths) flow.path_links.push_back(links_of(graph, p));
}

namespace detail {

struct Exclusions {
  std::vector<char> nodes;
  std::unordered_set<std::uint32_t> links;
};

// Hop-count shortest s->d path avoiding the exclusions; among all shortest
// paths, the lexicographically smallest node sequence.
inline std::optional<Path> lex_shortest_path(const NetworkGraph& graph, NodeId s, NodeId d,
                                             const Exclusions& ex) {
  const std::size_t n = graph.node_count();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  auto banned = [&](NodeId v) { return !ex.nodes.empty() && ex.nodes[v.index()]; };
  if (banned(s) || banned(d)) return std::nullopt;

  std::vector<std::size_t> dist(n, kInf);
  std::deque<NodeId> frontier{d};
  dist[d.index()] = 0;
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop_front();
    for (LinkId l : graph.in_links(v)) {
      if (ex.links.count(l.value)) continue;
      NodeId u = graph.link(l).tx;
      if (banned(u) || dist[u.index()] != kInf) continue;
      dist[u.index()] = dist[v.index()] + 1;
      frontier.push_back(u);
    }
  }
  if (dist[s.index()] == kInf) return std::nullopt;

  Path path{{s}};
  NodeId cur = s;
  while (cur != d) {
    std::optional<NodeId> next;
    for (LinkId l : graph.out_links(cur)) {
      if (ex.links.count(l.value)) continue;
      NodeId v = graph.link(l).rx;
      if (banned(v) || dist[v.index()] + 1 != dist[cur.index()]) continue;
      if (!next || v < *next) next = v;
    }
    cur = *next;
    path.nodes.push_back(cur);
  }
  return path;
}

}  // namespace detail

// Up to `k` loopless s->d paths in (hop count, lexicographic) order.
inline std::vector<Path> k_shortest_paths(const NetworkGraph& graph, NodeId s, NodeId d,
                                          std::size_t k) {
  std::vector<Path> accepted;
  if (k == 0) return accepted;
  auto first = detail::lex_shortest_path(graph, s, d, {});
  if (!first) return accepted;
  accepted.push_back(*first);
  std::set<Path, PathOrder> candidates;

  while (accepted.size() < k) {
    const Path& prev = accepted.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      detail::Exclusions ex;
      ex.nodes.assign(graph.node_count(), 0);
      for (std::size_t r = 0; r < i; ++r) ex.nodes[prev.nodes[r].index()] = 1;
      for (const Path& p : accepted) {
        if (p.nodes.size() > i + 1 && std::equal(p.nodes.begin(), p.nodes.begin() + i + 1, prev.nodes.begin())) {
          if (auto l = graph.find_link(p.nodes[i], p.nodes[i + 1])) ex.links.insert(l->value);
        }
      }
      auto spur = detail::lex_shortest_path(graph, prev.nodes[i], d, ex);
      if (!spur) continue;
      Path total;
      total.nodes.assign(prev.nodes.begin(), prev.nodes.begin() + i);
      total.nodes.insert(total.nodes.end(), spur->nodes.begin(), spur->nodes.end());
      if (std::find(accepted.begin(), accepted.end(), total) == accepted.end()) candidates.insert(total);
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

inline bool internally_disjoint(const Path& a, const Path& b) {
  if (a.nodes.size() < 2 || b.nodes.size() < 2) return false;
  std::unordered_set<NodeId> interior(a.nodes.begin() + 1, a.nodes.end() - 1);
  for (std::size_t i = 1; i + 1 < b.nodes.size(); ++i)
    if (interior.count(b.nodes[i])) return false;
  // Same first or last hop would make the pair share a link.
  return a != b;
}

struct DisjointPair {
  Path primary;
  Path secondary;
};

// Shortest path plus the shortest of the k_max-shortest candidates that is
// internally node-disjoint from it.
inline DisjointPair compute_disjoint_paths(const NetworkGraph& graph, NodeId s, NodeId d,
                                           std::size_t k_max = 32) {
  if (s == d) throw Error("source equals destination");
  if (s.index() >= graph.node_count() || d.index() >= graph.node_count())
    throw Error("unknown node");
  auto candidates = k_shortest_paths(graph, s, d, k_max);
  if (candidates.empty()) throw NoRoute("no route from node " + std::to_string(s.value));
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (internally_disjoint(candidates[0], candidates[i])) return {candidates[0], candidates[i]};
  throw NoDisjointPair("no node-disjoint second path for node " + std::to_string(s.value) +
                       " within " + std::to_string(k_max) + " candidates");
}

// Each path, read as a 0/1 link indicator, must carry net out-flow +1 at the
// source, -1 at the destination and 0 everywhere else.
inline bool validate_flow_conservation(const NetworkGraph& graph, const Flow& flow) {
  if (flow.paths.empty()) return false;
  for (const Path& p : flow.paths) {
    if (p.nodes.size() < 2 || p.source() != flow.source || p.destination() != flow.destination)
      return false;
    std::set<std::pair<std::uint32_t, std::uint32_t>> used;
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
      if (graph.find_link(p.nodes[i], p.nodes[i + 1])) used.emplace(p.nodes[i].value, p.nodes[i + 1].value);
    std::unordered_map<std::uint32_t, int> net;
    for (auto [tx, rx] : used) {
      ++net[tx];
      --net[rx];
    }
    for (const Node& n : graph.nodes()) {
      int expected = n.id == flow.source ? 1 : n.id == flow.destination ? -1 : 0;
      auto it = net.find(n.id.value);
      if ((it == net.end() ? 0 : it->second) != expected) return false;
    }
  }
  return true;
}

// Every node other than source and destination lies on at most one path.
inline bool validate_node_disjoint(const Flow& flow) {
  if (flow.paths.size() != 2) return false;
  std::unordered_map<NodeId, int> visits;
  for (const Path& p : flow.paths) {
    std::unordered_set<NodeId> seen;
    for (NodeId v : p.nodes) {
      if (v == flow.source || v == flow.destination) continue;
      if (!seen.insert(v).second) return false;
      if (++visits[v] > 1) return false;
    }
  }
  return true;
}

enum class PathMode { SinglePath, DualPath };

struct RoutingReport {
  std::vector<Flow> flows;
  // Flows that fell back to one path because no disjoint pair was found.
  std::vector<FlowId> degraded;
};

// Offline phase: one uplink flow per UE towards the donor. Flow ids follow
// UE order; `periods[i]` is the generation period of flow i.
inline RoutingReport configure_flows(const NetworkGraph& graph, PathMode mode,
                                     const std::vector<Slot>& periods, std::size_t k_max = 32) {
  RoutingReport report;
  auto ues = graph.nodes_of_kind(NodeKind::Ue);
  if (periods.size() != ues.size()) throw Error("one generation period per UE expected");
  for (std::size_t i = 0; i < ues.size(); ++i) {
    Flow flow;
    flow.id = FlowId{static_cast<std::uint32_t>(i)};
    flow.source = ues[i];
    flow.destination = kDonor;
    flow.generation_period = periods[i];
    if (mode == PathMode::SinglePath) {
      auto first = detail::lex_shortest_path(graph, flow.source, kDonor, {});
      if (!first) throw NoRoute("no route from node " + std::to_string(flow.source.value));
      flow.paths = {*first};
    } else {
      try {
        auto pair = compute_disjoint_paths(graph, flow.source, kDonor, k_max);
        flow.paths = {pair.primary, pair.secondary};
      } catch (const NoDisjointPair&) {
        flow.paths = {*detail::lex_shortest_path(graph, flow.source, kDonor, {})};
        report.degraded.push_back(flow.id);
      }
    }
    resolve_links(graph, flow);
    report.flows.push_back(std::move(flow));
  }
  return report;
}

}  // namespace iabsim
