#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "compose/registry.hpp"

namespace compose {

using NodeId = int;

struct NodeData {
  std::string type;
  std::optional<std::int64_t> param;
};

struct Endpoint {
  NodeId node = -1;
  std::string port;

  friend bool operator==(const Endpoint& a, const Endpoint& b) {
    return a.node == b.node && a.port == b.port;
  }
  friend auto operator<=>(const Endpoint& a, const Endpoint& b) = default;
};

/// One join between two object instances. `from` is the out (superscript)
/// side of the canonical join type; `described_reversed` records whether the
/// source text spelled this join in the reverse direction (the ~ form). The
/// flag is presentation only: equivalence and evaluation ignore it.
struct Edge {
  int label = 0;
  std::string join;  // canonical join type name
  Endpoint from;
  Endpoint to;
  bool described_reversed = false;
};

struct FreePort {
  NodeId node = -1;
  std::string port;
  std::string join;       // canonical join type of the port
  PortDir direction = PortDir::Out;
};

class CompositeGraph;

/// Assembles and validates a CompositeGraph. Every edge is checked against
/// the registry: both ports must exist, accept the edge's join type on the
/// right side, and be bound at most once. Self-joins (both endpoints on one
/// instance) are rejected; the bipartite foundation has no way to express
/// them.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::shared_ptr<const Registry> registry);

  NodeId add_node(const std::string& type, std::optional<std::int64_t> param = std::nullopt);

  /// `join` may be any registered name; it is normalized to the canonical
  /// pair member, flipping endpoints when the reverse spelling was used.
  void add_edge(int label, const std::string& join, Endpoint out_side, Endpoint in_side,
                bool described_reversed = false);

  CompositeGraph build() &&;

 private:
  std::shared_ptr<const Registry> registry_;
  std::vector<NodeData> nodes_;
  std::vector<Edge> edges_;
};

/// The canonical meaning of a term: object instances plus typed joins bound
/// to ports. Node ids are assigned in construction order and never affect
/// equivalence. Null joins are not stored; disjointness is disconnection.
/// Immutable after construction.
class CompositeGraph {
 public:
  CompositeGraph() = default;

  const std::vector<NodeData>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::shared_ptr<const Registry>& registry_ptr() const { return registry_; }
  const Registry& registry() const { return *registry_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const NodeData& node(NodeId id) const { return nodes_.at(static_cast<size_t>(id)); }
  const Edge* find_edge(int label) const;

  bool port_bound(const Endpoint& ep) const;

  /// Unbound ports, sorted by (node id, declared port position).
  std::vector<FreePort> free_ports() const;

  /// Connected components, ordered by smallest member node id. Node ids are
  /// renumbered per component (original relative order); edge labels are kept.
  std::vector<CompositeGraph> components() const;

  /// Subgraph induced by `keep` (edges with both endpoints inside). Node ids
  /// renumbered in ascending original order.
  CompositeGraph induced(const std::set<NodeId>& keep) const;

  /// Side-by-side union with no cross edges. Colliding edge labels in `right`
  /// are renumbered past the maximum label of `left`.
  static CompositeGraph disjoint_union(const CompositeGraph& left, const CompositeGraph& right);

 private:
  friend class GraphBuilder;
  std::shared_ptr<const Registry> registry_;
  std::vector<NodeData> nodes_;
  std::vector<Edge> edges_;
};

/// Structural equality including node order, labels, and presentation flags.
/// For equality up to relabeling use rewrite's alpha_equivalent.
bool identical(const CompositeGraph& a, const CompositeGraph& b);

std::string describe_instance(const NodeData& node);

}  // namespace compose
