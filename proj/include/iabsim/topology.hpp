#pragma once

// Factory network graph: a grid of backhaul nodes (one of them the donor),
// uniformly placed UEs with two access links each, and the per-link
// conflict sets used by the scheduler.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iabsim/core.hpp"

namespace iabsim {

enum class NodeKind { Donor, Iab, Ue };

inline std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Donor: return "donor";
    case NodeKind::Iab: return "iab";
    case NodeKind::Ue: return "ue";
  }
  return "?";
}

struct Position {
  double x{0.0};
  double y{0.0};
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Node {
  NodeId id;
  NodeKind kind{NodeKind::Iab};
  Position position;
};

struct DirectedLink {
  NodeId tx;
  NodeId rx;
};

struct GridIndex {
  std::size_t row{0};
  std::size_t col{0};
};

class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(double width, double height) : width_(width), height_(height) {}

  NodeId add_node(NodeKind kind, Position position) {
    if (position.x < 0.0 || position.y < 0.0 || position.x > width_ || position.y > height_)
      throw Error("node position outside the factory rectangle");
    NodeId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back({id, kind, position});
    out_.emplace_back();
    in_.emplace_back();
    return id;
  }

  LinkId add_link(NodeId tx, NodeId rx) {
    if (tx == rx) throw Error("self link");
    if (tx.index() >= nodes_.size() || rx.index() >= nodes_.size())
      throw Error("link endpoint does not exist");
    if (find_link(tx, rx)) throw Error("duplicate link");
    LinkId id{static_cast<std::uint32_t>(links_.size())};
    links_.push_back({tx, rx});
    out_[tx.index()].push_back(id);
    in_[rx.index()].push_back(id);
    return id;
  }

  std::optional<LinkId> find_link(NodeId tx, NodeId rx) const {
    if (tx.index() >= out_.size()) return std::nullopt;
    for (LinkId l : out_[tx.index()])
      if (links_[l.index()].rx == rx) return l;
    return std::nullopt;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<DirectedLink>& links() const { return links_; }
  const Node& node(NodeId id) const { return nodes_.at(id.index()); }
  const DirectedLink& link(LinkId id) const { return links_.at(id.index()); }
  const std::vector<LinkId>& out_links(NodeId id) const { return out_.at(id.index()); }
  const std::vector<LinkId>& in_links(NodeId id) const { return in_.at(id.index()); }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  double width() const { return width_; }
  double height() const { return height_; }

  bool is_backhaul(NodeId id) const { return node(id).kind != NodeKind::Ue; }

  std::vector<NodeId> nodes_of_kind(NodeKind kind) const {
    std::vector<NodeId> out;
    for (const Node& n : nodes_)
      if (n.kind == kind) out.push_back(n.id);
    return out;
  }

 private:
  double width_{0.0};
  double height_{0.0};
  std::vector<Node> nodes_;
  std::vector<DirectedLink> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<std::vector<LinkId>> in_;
};

// Backhaul grid. Node ids: donor is 0, remaining grid cells follow in
// row-major order. Cell (r, c) sits at (c * spacing, r * spacing).
inline NetworkGraph build_grid_topology(std::size_t rows, std::size_t cols, double spacing,
                                        GridIndex donor) {
  if (rows == 0 || cols == 0) throw Error("grid needs at least one row and one column");
  if (donor.row >= rows || donor.col >= cols) throw Error("donor position outside the grid");
  if (!(spacing > 0.0) && rows * cols > 1) throw Error("grid spacing must be positive");

  NetworkGraph graph(static_cast<double>(cols - 1) * spacing,
                     static_cast<double>(rows - 1) * spacing);
  std::vector<NodeId> cell(rows * cols);
  auto pos = [&](std::size_t r, std::size_t c) {
    return Position{static_cast<double>(c) * spacing, static_cast<double>(r) * spacing};
  };
  cell[donor.row * cols + donor.col] = graph.add_node(NodeKind::Donor, pos(donor.row, donor.col));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (r != donor.row || c != donor.col) cell[r * cols + c] = graph.add_node(NodeKind::Iab, pos(r, c));

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      NodeId here = cell[r * cols + c];
      if (c + 1 < cols) {
        NodeId right = cell[r * cols + c + 1];
        graph.add_link(here, right);
        graph.add_link(right, here);
      }
      if (r + 1 < rows) {
        NodeId below = cell[(r + 1) * cols + c];
        graph.add_link(here, below);
        graph.add_link(below, here);
      }
    }
  }
  return graph;
}

inline GridIndex center_cell(std::size_t rows, std::size_t cols) { return {rows / 2, cols / 2}; }

// The two backhaul nodes closest to `p`, ties broken by node id.
inline std::pair<NodeId, NodeId> two_nearest_backhaul(const NetworkGraph& graph, Position p) {
  std::vector<std::pair<double, NodeId>> ranked;
  for (const Node& n : graph.nodes())
    if (n.kind != NodeKind::Ue) ranked.emplace_back(distance(n.position, p), n.id);
  if (ranked.size() < 2) throw Error("packet duplication needs at least two backhaul nodes");
  std::partial_sort(ranked.begin(), ranked.begin() + 2, ranked.end());
  return {ranked[0].second, ranked[1].second};
}

// Adds `count` UEs uniformly in the factory rectangle. Each UE gets uplink
// access links to its two nearest backhaul nodes.
inline void place_ues(NetworkGraph& graph, std::size_t count, Rng& rng) {
  if (count == 0) return;
  std::size_t backhaul = graph.node_count() - graph.nodes_of_kind(NodeKind::Ue).size();
  if (backhaul < 2) throw Error("packet duplication needs at least two backhaul nodes");
  for (std::size_t u = 0; u < count; ++u) {
    Position p{rng.uniform() * graph.width(), rng.uniform() * graph.height()};
    NodeId ue = graph.add_node(NodeKind::Ue, p);
    auto [first, second] = two_nearest_backhaul(graph, p);
    graph.add_link(ue, first);
    graph.add_link(ue, second);
  }
}

// Adds a UE at an explicit position (tests and hand-built scenarios).
inline NodeId place_ue_at(NetworkGraph& graph, Position p) {
  NodeId ue = graph.add_node(NodeKind::Ue, p);
  auto [first, second] = two_nearest_backhaul(graph, p);
  graph.add_link(ue, first);
  graph.add_link(ue, second);
  return ue;
}

// Symmetric link conflict relation. A link never conflicts with itself.
class ConflictSets {
 public:
  ConflictSets() = default;
  explicit ConflictSets(std::size_t links) : sets_(links), matrix_(links * links, 0) {}

  void add(LinkId a, LinkId b) {
    if (a == b || conflicts(a, b)) return;
    matrix_[a.index() * size() + b.index()] = 1;
    matrix_[b.index() * size() + a.index()] = 1;
    sets_[a.index()].push_back(b);
    sets_[b.index()].push_back(a);
  }

  bool conflicts(LinkId a, LinkId b) const { return matrix_[a.index() * size() + b.index()] != 0; }
  const std::vector<LinkId>& of(LinkId l) const { return sets_.at(l.index()); }
  std::size_t size() const { return sets_.size(); }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& s : sets_) d = std::max(d, s.size());
    return d;
  }

 private:
  std::vector<std::vector<LinkId>> sets_;
  std::vector<char> matrix_;
};

// Two links conflict when they share an endpoint (half-duplex) or when any
// endpoint of one lies within `range` of any endpoint of the other.
inline bool links_interfere(const NetworkGraph& graph, LinkId a, LinkId b, double range) {
  if (a == b) return false;
  const DirectedLink& la = graph.link(a);
  const DirectedLink& lb = graph.link(b);
  const NodeId ea[2] = {la.tx, la.rx};
  const NodeId eb[2] = {lb.tx, lb.rx};
  for (NodeId u : ea)
    for (NodeId v : eb) {
      if (u == v) return true;
      if (distance(graph.node(u).position, graph.node(v).position) <= range) return true;
    }
  return false;
}

inline ConflictSets build_conflict_sets(const NetworkGraph& graph, double range) {
  if (range < 0.0) throw Error("interference range must be non-negative");
  const std::size_t n = graph.link_count();
  ConflictSets sets(n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (links_interfere(graph, LinkId{a}, LinkId{b}, range)) sets.add(LinkId{a}, LinkId{b});
  return sets;
}

}  // namespace iabsim
