#include "compose/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace compose {

std::string describe_instance(const NodeData& node) {
  if (node.param) return node.type + "[" + std::to_string(*node.param) + "]";
  return node.type;
}

GraphBuilder::GraphBuilder(std::shared_ptr<const Registry> registry)
    : registry_(std::move(registry)) {
  if (!registry_) fail(ErrorKind::Internal, "graph builder needs a registry");
}

NodeId GraphBuilder::add_node(const std::string& type, std::optional<std::int64_t> param) {
  const ObjectType& ot = registry_->object_type(type);
  if (ot.has_param && !param)
    fail(ErrorKind::Validation, "object type '" + type + "' requires a [param] value");
  if (!ot.has_param && param)
    fail(ErrorKind::Validation, "object type '" + type + "' does not take a [param] value");
  nodes_.push_back(NodeData{type, param});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

void GraphBuilder::add_edge(int label, const std::string& join, Endpoint out_side,
                            Endpoint in_side, bool described_reversed) {
  const JoinType& jt = registry_->join(join);
  if (jt.is_null)
    fail(ErrorKind::Validation, "null joins are implicit and cannot be stored as edges");
  std::string canonical = registry_->canonical_join(join);
  if (!jt.canonical) {
    std::swap(out_side, in_side);
    described_reversed = !described_reversed;
  }
  edges_.push_back(Edge{label, canonical, out_side, in_side, described_reversed});
}

CompositeGraph GraphBuilder::build() && {
  CompositeGraph g;
  g.registry_ = registry_;
  g.nodes_ = std::move(nodes_);
  g.edges_ = std::move(edges_);

  std::set<int> labels;
  std::set<std::pair<NodeId, std::string>> bound;
  for (const Edge& e : g.edges_) {
    if (!labels.insert(e.label).second)
      fail(ErrorKind::Validation, "duplicate edge label " + std::to_string(e.label));
    if (e.from.node == e.to.node)
      fail(ErrorKind::Validation, "join " + std::to_string(e.label) +
                                      " has both endpoints on one object instance");
    auto check_end = [&](const Endpoint& ep, PortDir want) {
      if (ep.node < 0 || ep.node >= g.node_count())
        fail(ErrorKind::Validation, "edge endpoint references unknown node");
      const ObjectType& ot = g.registry().object_type(g.node(ep.node).type);
      const Port* port = ot.find_port(ep.port);
      if (!port)
        fail(ErrorKind::Validation,
             "object type '" + ot.name + "' has no port '" + ep.port + "'");
      if (port->accepts != e.join)
        fail(ErrorKind::Validation, "port '" + ep.port + "' of '" + ot.name + "' accepts '" +
                                        port->accepts + "', not '" + e.join + "'");
      // Both endpoints of a self-reverse join count as the out side.
      if (!g.registry().is_self_reverse(e.join) && port->direction != want)
        fail(ErrorKind::Validation, "port '" + ep.port + "' of '" + ot.name +
                                        "' has the wrong direction for join '" + e.join + "'");
      if (!bound.insert({ep.node, ep.port}).second)
        fail(ErrorKind::Validation, "port '" + ep.port + "' of node " +
                                        std::to_string(ep.node) + " is bound more than once");
    };
    check_end(e.from, PortDir::Out);
    check_end(e.to, PortDir::In);
  }
  return g;
}

const Edge* CompositeGraph::find_edge(int label) const {
  for (const Edge& e : edges_)
    if (e.label == label) return &e;
  return nullptr;
}

bool CompositeGraph::port_bound(const Endpoint& ep) const {
  for (const Edge& e : edges_)
    if (e.from == ep || e.to == ep) return true;
  return false;
}

std::vector<FreePort> CompositeGraph::free_ports() const {
  std::vector<FreePort> out;
  for (NodeId id = 0; id < node_count(); ++id) {
    const ObjectType& ot = registry().object_type(node(id).type);
    for (const Port& p : ot.ports) {
      if (port_bound({id, p.id})) continue;
      out.push_back(FreePort{id, p.id, p.accepts, p.direction});
    }
  }
  std::sort(out.begin(), out.end(), [](const FreePort& a, const FreePort& b) {
    return std::tie(a.node, a.port) < std::tie(b.node, b.port);
  });
  return out;
}

std::vector<CompositeGraph> CompositeGraph::components() const {
  std::vector<int> comp(static_cast<size_t>(node_count()), -1);
  std::vector<std::vector<NodeId>> groups;
  for (NodeId start = 0; start < node_count(); ++start) {
    if (comp[static_cast<size_t>(start)] != -1) continue;
    int cid = static_cast<int>(groups.size());
    std::vector<NodeId> stack{start}, members;
    comp[static_cast<size_t>(start)] = cid;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (const Edge& e : edges_) {
        NodeId other = -1;
        if (e.from.node == v) other = e.to.node;
        else if (e.to.node == v) other = e.from.node;
        if (other >= 0 && comp[static_cast<size_t>(other)] == -1) {
          comp[static_cast<size_t>(other)] = cid;
          stack.push_back(other);
        }
      }
    }
    std::sort(members.begin(), members.end());
    groups.push_back(std::move(members));
  }

  std::vector<CompositeGraph> out;
  out.reserve(groups.size());
  for (const auto& members : groups)
    out.push_back(induced(std::set<NodeId>(members.begin(), members.end())));
  return out;
}

CompositeGraph CompositeGraph::induced(const std::set<NodeId>& keep) const {
  std::map<NodeId, NodeId> remap;
  CompositeGraph g;
  g.registry_ = registry_;
  for (NodeId id : keep) {
    if (id < 0 || id >= node_count()) fail(ErrorKind::Validation, "induced: unknown node id");
    remap[id] = static_cast<NodeId>(g.nodes_.size());
    g.nodes_.push_back(node(id));
  }
  for (const Edge& e : edges_) {
    if (!keep.count(e.from.node) || !keep.count(e.to.node)) continue;
    Edge copy = e;
    copy.from.node = remap[e.from.node];
    copy.to.node = remap[e.to.node];
    g.edges_.push_back(copy);
  }
  return g;
}

CompositeGraph CompositeGraph::disjoint_union(const CompositeGraph& left,
                                              const CompositeGraph& right) {
  if (left.registry_ && right.registry_ && !(*left.registry_ == *right.registry_))
    fail(ErrorKind::Validation, "disjoint_union: registries differ");
  CompositeGraph g;
  g.registry_ = left.registry_ ? left.registry_ : right.registry_;
  g.nodes_ = left.nodes_;
  g.nodes_.insert(g.nodes_.end(), right.nodes_.begin(), right.nodes_.end());
  g.edges_ = left.edges_;
  int max_label = 0;
  std::set<int> used;
  for (const Edge& e : left.edges_) {
    used.insert(e.label);
    max_label = std::max(max_label, e.label);
  }
  NodeId offset = left.node_count();
  for (Edge e : right.edges_) {
    e.from.node += offset;
    e.to.node += offset;
    if (used.count(e.label)) e.label = ++max_label;
    else max_label = std::max(max_label, e.label);
    used.insert(e.label);
    g.edges_.push_back(e);
  }
  return g;
}

bool identical(const CompositeGraph& a, const CompositeGraph& b) {
  if (a.node_count() != b.node_count() || a.edges().size() != b.edges().size()) return false;
  for (int i = 0; i < a.node_count(); ++i) {
    if (a.node(i).type != b.node(i).type || a.node(i).param != b.node(i).param) return false;
  }
  auto edge_key = [](const Edge& e) {
    return std::tuple(e.label, e.join, e.from, e.to, e.described_reversed);
  };
  std::vector<Edge> ea = a.edges(), eb = b.edges();
  auto by_key = [&](const Edge& x, const Edge& y) { return edge_key(x) < edge_key(y); };
  std::sort(ea.begin(), ea.end(), by_key);
  std::sort(eb.begin(), eb.end(), by_key);
  for (size_t i = 0; i < ea.size(); ++i)
    if (edge_key(ea[i]) != edge_key(eb[i])) return false;
  return true;
}

}  // namespace compose
