#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "compose/backend.hpp"
#include "compose/graph.hpp"
#include "compose/tree.hpp"

namespace compose {

/// A two-way split of a graph's node set. Both sides must be nonempty.
struct Bipartition {
  std::set<NodeId> left;
  std::set<NodeId> right;
};

/// True iff an isomorphism matches object types, params, port bindings, and
/// join types. Edge labels, node order, and reverse-description flags are
/// ignored. Requires structurally equal registries.
bool alpha_equivalent(const CompositeGraph& a, const CompositeGraph& b);

/// Deterministic representative of the alpha-class: canonicalize(a) is
/// structurally identical to canonicalize(b) iff alpha_equivalent(a, b).
/// Nodes are reordered, edge labels renumbered 1..E, description flags
/// cleared. Iterative refinement with exhaustive tie-breaking; exact.
CompositeGraph canonicalize(const CompositeGraph& graph);

/// Canonical node order of `graph` (a permutation: position -> node id).
std::vector<NodeId> canonical_order(const CompositeGraph& graph);

/// Re-describes one join in the opposite direction (the R form). Involution:
/// reversing the same label twice restores the graph exactly.
CompositeGraph reverse_join(const CompositeGraph& graph, int edge_label);

/// Expands a composition tree into its graph: leaves become nodes, bundle
/// joins become edges. Errors if a bundle binds an already-bound port.
CompositeGraph flatten(const BipartiteTree& tree, std::shared_ptr<const Registry> registry);

struct Factorization {
  CompositeGraph left;
  CompositeGraph right;
  JoinBundle bundle;                 // crossing edges, described left-to-right
  std::vector<NodeId> left_nodes;    // original node id per left-graph node
  std::vector<NodeId> right_nodes;
};

/// Splits a graph at a bipartition. The bundle is exactly the crossing edge
/// set; right-to-left joins are described via the reverse type. Every
/// bipartition is legal; a non-crossing cut yields the null bundle.
Factorization factorize(const CompositeGraph& graph, const Bipartition& partition);

/// Recursively factorizes into a composition tree whose leaf ids are the
/// graph's node ids. `split` picks the left half of each node set (must be a
/// proper nonempty subset); the default splits off the smallest id.
BipartiteTree order_from_splits(
    const CompositeGraph& graph,
    const std::function<std::set<NodeId>(const std::set<NodeId>&)>& split);

/// Some valid composition order (left comb over node ids).
BipartiteTree default_order(const CompositeGraph& graph);

/// All unordered full binary composition trees over the node set, each
/// flattening to an alpha-equivalent copy of the input. Count is (2n-3)!!.
/// Errors when node count exceeds `max_nodes`.
std::vector<BipartiteTree> enumerate_orders(const CompositeGraph& graph, int max_nodes = 8);

/// Port complement within one object type: the ports of `type_name` not in
/// `used_ports`. The complement of the empty (null) bundle is the complete
/// join; the complement of the full port set is empty.
std::vector<Port> complement_join(const Registry& registry, const std::string& type_name,
                                  const std::vector<std::string>& used_ports);

/// One typed composition rule: two successive edges of types when[0], when[1]
/// through a shared middle node imply a `then` edge between the outer nodes.
struct ImplicationRule {
  std::string when_first;
  std::string when_second;
  std::string then;
};

/// Closes the graph under the rules (monotone, idempotent). Errors when an
/// implied edge cannot be bound because a required port is already taken by
/// a conflicting join.
CompositeGraph imply_joins(const CompositeGraph& graph, const std::vector<ImplicationRule>& rules);

/// Drops every edge whose join type is outside `keep`. Errors unless each
/// removed edge is restored by rule closure over the pruned graph.
CompositeGraph prune(const CompositeGraph& graph, const std::set<std::string>& keep,
                     const std::vector<ImplicationRule>& rules);

/// Validates sufficiency of a join-type set over a bounded object family:
/// every family member must prune to `keep` without information loss.
bool is_sufficient_set(const std::set<std::string>& keep,
                       const std::vector<CompositeGraph>& family,
                       const std::vector<ImplicationRule>& rules);

/// Sufficient, and no single element can be removed.
bool is_minimal_set(const std::set<std::string>& keep,
                    const std::vector<CompositeGraph>& family,
                    const std::vector<ImplicationRule>& rules);

/// The composition principle as a fold: leaves via atomic_state, nodes via
/// join_states, null joins via disjoint_union. With no order given a default
/// order is used; the result is independent of the choice up to the
/// backend's state equality. Backend errors are rethrown with the offending
/// bundle identified.
StatePtr evaluate(const CompositeGraph& graph, const Backend& backend,
                  const BipartiteTree* order = nullptr);

}  // namespace compose
