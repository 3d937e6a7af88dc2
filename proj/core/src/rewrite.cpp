#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

#include "compose/rewrite.hpp"

namespace compose {

CompositeGraph reverse_join(const CompositeGraph& graph, int edge_label) {
  if (!graph.find_edge(edge_label))
    fail(ErrorKind::Validation, "no join with label " + std::to_string(edge_label));
  GraphBuilder builder(graph.registry_ptr());
  for (const NodeData& n : graph.nodes()) builder.add_node(n.type, n.param);
  for (const Edge& e : graph.edges()) {
    bool flag = e.label == edge_label ? !e.described_reversed : e.described_reversed;
    builder.add_edge(e.label, e.join, e.from, e.to, flag);
  }
  return std::move(builder).build();
}

CompositeGraph flatten(const BipartiteTree& tree, std::shared_ptr<const Registry> registry) {
  if (!registry) fail(ErrorKind::Internal, "flatten needs a registry");

  std::vector<NodeId> ids = tree.leaf_ids();
  std::set<NodeId> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size())
    fail(ErrorKind::Validation, "composition tree repeats a leaf id");
  if (*seen.begin() != 0 || *seen.rbegin() != static_cast<NodeId>(ids.size()) - 1)
    fail(ErrorKind::Validation, "composition tree leaf ids must cover 0..n-1");

  GraphBuilder builder(registry);
  std::map<NodeId, BipartiteTree::LeafData> leaves;
  std::function<void(const BipartiteTree&)> collect = [&](const BipartiteTree& t) {
    if (t.is_leaf()) {
      leaves[t.leaf_data().id] = t.leaf_data();
      return;
    }
    collect(t.left());
    collect(t.right());
  };
  collect(tree);
  for (const auto& [id, leaf] : leaves) {
    (void)id;
    builder.add_node(leaf.type, leaf.param);
  }

  int label = 0;
  std::function<std::set<NodeId>(const BipartiteTree&)> emit =
      [&](const BipartiteTree& t) -> std::set<NodeId> {
    if (t.is_leaf()) return {t.leaf_data().id};
    std::set<NodeId> lhs = emit(t.left());
    std::set<NodeId> rhs = emit(t.right());
    for (const BundleJoin& bj : t.bundle().joins) {
      if (!lhs.count(bj.left.node) || !rhs.count(bj.right.node))
        fail(ErrorKind::Validation,
             "bundle endpoint does not lie in the corresponding subtree");
      builder.add_edge(++label, bj.join, bj.out_endpoint(), bj.in_endpoint(),
                       !bj.left_is_out);
    }
    lhs.insert(rhs.begin(), rhs.end());
    return lhs;
  };
  emit(tree);
  return std::move(builder).build();
}

Factorization factorize(const CompositeGraph& graph, const Bipartition& partition) {
  if (partition.left.empty() || partition.right.empty())
    fail(ErrorKind::Validation, "both sides of a bipartition must be nonempty");
  for (NodeId id : partition.left)
    if (partition.right.count(id))
      fail(ErrorKind::Validation, "bipartition sides overlap");
  if (partition.left.size() + partition.right.size() !=
      static_cast<size_t>(graph.node_count()))
    fail(ErrorKind::Validation, "bipartition must cover the node set");

  Factorization out;
  out.left = graph.induced(partition.left);
  out.right = graph.induced(partition.right);
  out.left_nodes.assign(partition.left.begin(), partition.left.end());
  out.right_nodes.assign(partition.right.begin(), partition.right.end());

  std::vector<const Edge*> crossing;
  for (const Edge& e : graph.edges()) {
    bool from_left = partition.left.count(e.from.node) != 0;
    bool to_left = partition.left.count(e.to.node) != 0;
    if (from_left != to_left) crossing.push_back(&e);
  }
  std::sort(crossing.begin(), crossing.end(),
            [](const Edge* a, const Edge* b) { return a->label < b->label; });
  for (const Edge* e : crossing) {
    BundleJoin bj;
    bj.join = e->join;
    bj.left_is_out = partition.left.count(e->from.node) != 0;
    bj.left = bj.left_is_out ? e->from : e->to;
    bj.right = bj.left_is_out ? e->to : e->from;
    out.bundle.joins.push_back(bj);
  }
  return out;
}

namespace {

JoinBundle crossing_bundle(const CompositeGraph& graph, const std::set<NodeId>& left,
                           const std::set<NodeId>& right) {
  JoinBundle bundle;
  for (const Edge& e : graph.edges()) {
    bool from_left = left.count(e.from.node) != 0;
    bool from_right = right.count(e.from.node) != 0;
    bool to_left = left.count(e.to.node) != 0;
    bool to_right = right.count(e.to.node) != 0;
    if (from_left && to_right) {
      bundle.joins.push_back({e.join, e.from, e.to, true});
    } else if (from_right && to_left) {
      bundle.joins.push_back({e.join, e.to, e.from, false});
    }
  }
  return bundle;
}

BipartiteTree build_tree(const CompositeGraph& graph, const std::set<NodeId>& nodes,
                         const std::function<std::set<NodeId>(const std::set<NodeId>&)>& split) {
  if (nodes.size() == 1) {
    NodeId id = *nodes.begin();
    return BipartiteTree::leaf(id, graph.node(id).type, graph.node(id).param);
  }
  std::set<NodeId> left = split(nodes);
  if (left.empty() || left.size() >= nodes.size())
    fail(ErrorKind::Internal, "split must return a proper nonempty subset");
  std::set<NodeId> right;
  for (NodeId id : nodes)
    if (!left.count(id)) right.insert(id);
  return BipartiteTree::node(build_tree(graph, left, split), build_tree(graph, right, split),
                             crossing_bundle(graph, left, right));
}

}  // namespace

BipartiteTree order_from_splits(
    const CompositeGraph& graph,
    const std::function<std::set<NodeId>(const std::set<NodeId>&)>& split) {
  if (graph.node_count() == 0)
    fail(ErrorKind::Validation, "cannot build a composition order over no objects");
  std::set<NodeId> all;
  for (NodeId id = 0; id < graph.node_count(); ++id) all.insert(id);
  return build_tree(graph, all, split);
}

BipartiteTree default_order(const CompositeGraph& graph) {
  return order_from_splits(graph, [](const std::set<NodeId>& nodes) {
    return std::set<NodeId>{*nodes.begin()};
  });
}

namespace {

struct Shape {
  NodeId leaf = -1;  // >= 0 for leaves
  std::shared_ptr<const Shape> l, r;
};
using ShapePtr = std::shared_ptr<const Shape>;

ShapePtr make_leaf_shape(NodeId id) {
  auto s = std::make_shared<Shape>();
  s->leaf = id;
  return s;
}
ShapePtr make_node_shape(ShapePtr l, ShapePtr r) {
  auto s = std::make_shared<Shape>();
  s->l = std::move(l);
  s->r = std::move(r);
  return s;
}

// Every way of inserting `leaf` as the sibling of some subtree (including the
// whole tree). This enumerates each unordered full binary tree exactly once.
void insertions(const ShapePtr& shape, NodeId leaf, std::vector<ShapePtr>& out) {
  out.push_back(make_node_shape(shape, make_leaf_shape(leaf)));
  if (shape->leaf >= 0) return;
  std::vector<ShapePtr> sub;
  insertions(shape->l, leaf, sub);
  for (auto& s : sub) out.push_back(make_node_shape(s, shape->r));
  sub.clear();
  insertions(shape->r, leaf, sub);
  for (auto& s : sub) out.push_back(make_node_shape(shape->l, s));
}

BipartiteTree annotate(const CompositeGraph& graph, const Shape& shape,
                       std::set<NodeId>& nodes_out) {
  if (shape.leaf >= 0) {
    nodes_out.insert(shape.leaf);
    return BipartiteTree::leaf(shape.leaf, graph.node(shape.leaf).type,
                               graph.node(shape.leaf).param);
  }
  std::set<NodeId> left_nodes, right_nodes;
  BipartiteTree l = annotate(graph, *shape.l, left_nodes);
  BipartiteTree r = annotate(graph, *shape.r, right_nodes);
  JoinBundle bundle = crossing_bundle(graph, left_nodes, right_nodes);
  nodes_out.insert(left_nodes.begin(), left_nodes.end());
  nodes_out.insert(right_nodes.begin(), right_nodes.end());
  return BipartiteTree::node(std::move(l), std::move(r), std::move(bundle));
}

}  // namespace

std::vector<BipartiteTree> enumerate_orders(const CompositeGraph& graph, int max_nodes) {
  int n = graph.node_count();
  if (n > max_nodes)
    fail(ErrorKind::Validation, "node count " + std::to_string(n) +
                                    " exceeds the order-enumeration bound " +
                                    std::to_string(max_nodes));
  std::vector<BipartiteTree> out;
  if (n == 0) return out;

  std::vector<ShapePtr> shapes{make_leaf_shape(0)};
  for (NodeId leaf = 1; leaf < n; ++leaf) {
    std::vector<ShapePtr> next;
    for (const ShapePtr& s : shapes) insertions(s, leaf, next);
    shapes = std::move(next);
  }
  out.reserve(shapes.size());
  for (const ShapePtr& s : shapes) {
    std::set<NodeId> all;
    out.push_back(annotate(graph, *s, all));
  }
  return out;
}

std::vector<Port> complement_join(const Registry& registry, const std::string& type_name,
                                  const std::vector<std::string>& used_ports) {
  const ObjectType& ot = registry.object_type(type_name);
  for (const std::string& id : used_ports)
    if (!ot.find_port(id))
      fail(ErrorKind::Validation,
           "port '" + id + "' does not belong to object type '" + type_name + "'");
  std::vector<Port> out;
  for (const Port& p : ot.ports) {
    if (std::find(used_ports.begin(), used_ports.end(), p.id) == used_ports.end())
      out.push_back(p);
  }
  return out;
}

namespace {

const Port* first_free_port(const CompositeGraph& graph,
                            const std::set<std::pair<NodeId, std::string>>& bound, NodeId node,
                            const std::string& join, PortDir dir) {
  const ObjectType& ot = graph.registry().object_type(graph.node(node).type);
  bool self_rev = graph.registry().is_self_reverse(join);
  for (const Port& p : ot.ports) {
    if (p.accepts != join) continue;
    if (!self_rev && p.direction != dir) continue;
    if (bound.count({node, p.id})) continue;
    return &p;
  }
  return nullptr;
}

}  // namespace

CompositeGraph imply_joins(const CompositeGraph& graph,
                           const std::vector<ImplicationRule>& rules) {
  const Registry& reg = graph.registry();
  for (const ImplicationRule& r : rules) {
    reg.join(r.when_first);
    reg.join(r.when_second);
    reg.join(r.then);
  }

  std::vector<Edge> edges = graph.edges();
  std::set<std::pair<NodeId, std::string>> bound;
  int max_label = 0;
  for (const Edge& e : edges) {
    bound.insert({e.from.node, e.from.port});
    bound.insert({e.to.node, e.to.port});
    max_label = std::max(max_label, e.label);
  }

  auto has_edge = [&](NodeId u, NodeId w, const std::string& join) {
    for (const Edge& e : edges)
      if (e.from.node == u && e.to.node == w && e.join == join) return true;
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const ImplicationRule& rule : rules) {
      std::string t1 = reg.canonical_join(rule.when_first);
      std::string t2 = reg.canonical_join(rule.when_second);
      std::string then = reg.canonical_join(rule.then);
      // Chains u -t1-> m -t2-> w, scanned in label order for determinism.
      for (size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].join != t1) continue;
        for (size_t j = 0; j < edges.size(); ++j) {
          if (edges[j].join != t2 || edges[j].from.node != edges[i].to.node) continue;
          NodeId u = edges[i].from.node;
          NodeId w = edges[j].to.node;
          if (u == w)
            fail(ErrorKind::Validation,
                 "implication forces a join from an instance to itself");
          if (has_edge(u, w, then)) continue;
          const Port* up = first_free_port(graph, bound, u, then, PortDir::Out);
          const Port* wp = first_free_port(graph, bound, w, then, PortDir::In);
          if (!up || !wp)
            fail(ErrorKind::Validation,
                 "implied join '" + then + "' between nodes " + std::to_string(u) + " and " +
                     std::to_string(w) + " conflicts with an existing binding");
          edges.push_back(Edge{++max_label, then, {u, up->id}, {w, wp->id}, false});
          bound.insert({u, up->id});
          bound.insert({w, wp->id});
          changed = true;
        }
      }
    }
  }

  GraphBuilder builder(graph.registry_ptr());
  for (const NodeData& n : graph.nodes()) builder.add_node(n.type, n.param);
  for (const Edge& e : edges) builder.add_edge(e.label, e.join, e.from, e.to,
                                               e.described_reversed);
  return std::move(builder).build();
}

CompositeGraph prune(const CompositeGraph& graph, const std::set<std::string>& keep,
                     const std::vector<ImplicationRule>& rules) {
  const Registry& reg = graph.registry();
  std::set<std::string> canonical_keep;
  for (const std::string& name : keep) canonical_keep.insert(reg.canonical_join(name));

  std::vector<Edge> kept, removed;
  for (const Edge& e : graph.edges())
    (canonical_keep.count(e.join) ? kept : removed).push_back(e);

  GraphBuilder builder(graph.registry_ptr());
  for (const NodeData& n : graph.nodes()) builder.add_node(n.type, n.param);
  for (const Edge& e : kept) builder.add_edge(e.label, e.join, e.from, e.to,
                                              e.described_reversed);
  CompositeGraph pruned = std::move(builder).build();

  if (!removed.empty()) {
    CompositeGraph closure = [&] {
      try {
        return imply_joins(pruned, rules);
      } catch (const Error& err) {
        fail(ErrorKind::Validation,
             std::string("pruned description is not closable: ") + err.what());
      }
    }();
    for (const Edge& gone : removed) {
      bool restored = false;
      for (const Edge& e : closure.edges())
        if (e.join == gone.join && e.from == gone.from && e.to == gone.to) restored = true;
      if (!restored)
        fail(ErrorKind::Validation, "pruning would lose join '" + gone.join + "' (label " +
                                        std::to_string(gone.label) +
                                        "); it is not implied by the kept joins");
    }
  }
  return pruned;
}

bool is_sufficient_set(const std::set<std::string>& keep,
                       const std::vector<CompositeGraph>& family,
                       const std::vector<ImplicationRule>& rules) {
  for (const CompositeGraph& g : family) {
    try {
      prune(g, keep, rules);
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

bool is_minimal_set(const std::set<std::string>& keep,
                    const std::vector<CompositeGraph>& family,
                    const std::vector<ImplicationRule>& rules) {
  if (!is_sufficient_set(keep, family, rules)) return false;
  for (const std::string& name : keep) {
    std::set<std::string> reduced = keep;
    reduced.erase(name);
    if (is_sufficient_set(reduced, family, rules)) return false;
  }
  return true;
}

namespace {

std::string describe_bundle(const JoinBundle& bundle, const CompositeGraph& graph) {
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < bundle.joins.size(); ++i) {
    const BundleJoin& bj = bundle.joins[i];
    if (i) out << "; ";
    out << (bj.left_is_out ? bj.join : "~" + bj.join) << ": "
        << describe_instance(graph.node(bj.left.node)) << '.' << bj.left.port << " -> "
        << describe_instance(graph.node(bj.right.node)) << '.' << bj.right.port;
  }
  out << '}';
  return out.str();
}

StatePtr fold(const BipartiteTree& tree, const CompositeGraph& graph, const Backend& backend) {
  if (tree.is_leaf()) return backend.atomic_state(graph, tree.leaf_data().id);
  StatePtr left = fold(tree.left(), graph, backend);
  StatePtr right = fold(tree.right(), graph, backend);
  if (tree.bundle().is_null()) return backend.disjoint_union(left, right);
  try {
    return backend.join_states(left, right, tree.bundle(), graph);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Backend) throw;
    fail(ErrorKind::Backend, std::string(err.what()) + " [while composing bundle " +
                                 describe_bundle(tree.bundle(), graph) + "]");
  }
}

}  // namespace

StatePtr evaluate(const CompositeGraph& graph, const Backend& backend,
                  const BipartiteTree* order) {
  backend.validate_graph(graph);
  if (graph.node_count() == 0) return backend.empty_state();

  if (order) {
    if (order->leaf_count() != graph.node_count())
      fail(ErrorKind::Validation, "composition order does not cover the object set");
    for (NodeId id : order->leaf_ids())
      if (id < 0 || id >= graph.node_count())
        fail(ErrorKind::Validation, "composition order references unknown node id");
    // Leaf ids are node ids, so the rebuilt graph must match node for node
    // and edge for edge (labels, descriptions, and the orientation of
    // self-reverse joins aside).
    CompositeGraph rebuilt = flatten(*order, graph.registry_ptr());
    auto edge_keys = [](const CompositeGraph& g) {
      std::vector<std::tuple<std::string, Endpoint, Endpoint>> keys;
      for (const Edge& e : g.edges()) {
        Endpoint a = e.from, b = e.to;
        if (g.registry().is_self_reverse(e.join) && b < a) std::swap(a, b);
        keys.emplace_back(e.join, a, b);
      }
      std::sort(keys.begin(), keys.end());
      return keys;
    };
    bool same = true;
    for (NodeId id = 0; id < graph.node_count() && same; ++id)
      same = rebuilt.node(id).type == graph.node(id).type &&
             rebuilt.node(id).param == graph.node(id).param;
    if (!same || edge_keys(rebuilt) != edge_keys(graph))
      fail(ErrorKind::Validation, "composition order describes a different composite");
    return fold(*order, graph, backend);
  }
  return fold(default_order(graph), graph, backend);
}

}  // namespace compose
