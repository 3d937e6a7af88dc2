#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

#include "compose/rewrite.hpp"

namespace compose {

namespace {

// One incident edge as seen from a node: role (out / in / symmetric), own
// port, join type, far port. Reverse-description flags are invisible here,
// so the whole search is alpha-class invariant.
struct Incidence {
  std::string descriptor;
  NodeId other;
};

struct CanonicalContext {
  const CompositeGraph& graph;
  std::vector<std::vector<Incidence>> incidences;

  explicit CanonicalContext(const CompositeGraph& g) : graph(g) {
    incidences.resize(static_cast<size_t>(g.node_count()));
    const Registry& reg = g.registry();
    for (const Edge& e : g.edges()) {
      bool sym = reg.is_self_reverse(e.join);
      std::string role_from = sym ? "s" : "o";
      std::string role_to = sym ? "s" : "i";
      incidences[static_cast<size_t>(e.from.node)].push_back(
          {role_from + "|" + e.from.port + "|" + e.join + "|" + e.to.port, e.to.node});
      incidences[static_cast<size_t>(e.to.node)].push_back(
          {role_to + "|" + e.to.port + "|" + e.join + "|" + e.from.port, e.from.node});
    }
  }
};

std::string node_invariant(const CompositeGraph& g, NodeId id) {
  const NodeData& n = g.node(id);
  std::string s = n.type;
  s += '[';
  if (n.param) s += std::to_string(*n.param);
  s += ']';
  return s;
}

using Coloring = std::vector<int>;

// One round of color refinement; colors stay ordered by invariant history.
Coloring refine_once(const CanonicalContext& ctx, const Coloring& colors, bool& changed) {
  size_t n = colors.size();
  std::vector<std::pair<std::string, size_t>> signatures(n);
  for (size_t v = 0; v < n; ++v) {
    std::vector<std::string> around;
    for (const Incidence& inc : ctx.incidences[v])
      around.push_back(inc.descriptor + "#" +
                       std::to_string(colors[static_cast<size_t>(inc.other)]));
    std::sort(around.begin(), around.end());
    std::ostringstream sig;
    sig << colors[v];
    for (const auto& a : around) sig << '/' << a;
    signatures[v] = {sig.str(), v};
  }
  std::vector<std::string> keys;
  keys.reserve(n);
  for (const auto& [sig, v] : signatures) keys.push_back(sig);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  Coloring next(n);
  for (size_t v = 0; v < n; ++v)
    next[v] = static_cast<int>(
        std::lower_bound(keys.begin(), keys.end(), signatures[v].first) - keys.begin());
  changed = next != colors;
  return next;
}

Coloring refine(const CanonicalContext& ctx, Coloring colors) {
  bool changed = true;
  while (changed) colors = refine_once(ctx, colors, changed);
  return colors;
}

bool discrete(const Coloring& colors) {
  std::vector<bool> seen(colors.size(), false);
  for (int c : colors) {
    if (seen[static_cast<size_t>(c)]) return false;
    seen[static_cast<size_t>(c)] = true;
  }
  return true;
}

// Split `v` off as its own class, ordered just before its old classmates.
Coloring individualize(const Coloring& colors, size_t v) {
  Coloring out = colors;
  int c = colors[v];
  for (size_t u = 0; u < out.size(); ++u)
    if (out[u] > c || (out[u] == c && u != v)) ++out[u];
  return out;
}

std::vector<NodeId> order_from_discrete(const Coloring& colors) {
  std::vector<NodeId> order(colors.size());
  for (size_t v = 0; v < colors.size(); ++v)
    order[static_cast<size_t>(colors[v])] = static_cast<NodeId>(v);
  return order;
}

std::string serialize_under(const CanonicalContext& ctx, const std::vector<NodeId>& order) {
  const CompositeGraph& g = ctx.graph;
  std::vector<int> position(order.size());
  for (size_t i = 0; i < order.size(); ++i)
    position[static_cast<size_t>(order[i])] = static_cast<int>(i);

  std::ostringstream out;
  for (NodeId id : order) out << 'N' << node_invariant(g, id) << ';';

  std::vector<std::string> edge_records;
  for (const Edge& e : g.edges()) {
    int pf = position[static_cast<size_t>(e.from.node)];
    int pt = position[static_cast<size_t>(e.to.node)];
    std::string from_port = e.from.port, to_port = e.to.port;
    if (g.registry().is_self_reverse(e.join) &&
        std::tie(pt, to_port) < std::tie(pf, from_port)) {
      std::swap(pf, pt);
      std::swap(from_port, to_port);
    }
    std::ostringstream rec;
    rec << 'E' << pf << ':' << from_port << ':' << e.join << ':' << pt << ':' << to_port << ';';
    edge_records.push_back(rec.str());
  }
  std::sort(edge_records.begin(), edge_records.end());
  for (const auto& r : edge_records) out << r;
  return out.str();
}

struct Best {
  std::string serialization;
  std::vector<NodeId> order;
  bool set = false;

  void offer(std::string s, std::vector<NodeId> o) {
    if (!set || s < serialization || (s == serialization && o < order)) {
      serialization = std::move(s);
      order = std::move(o);
      set = true;
    }
  }
};

void search(const CanonicalContext& ctx, Coloring colors, Best& best) {
  colors = refine(ctx, colors);
  if (discrete(colors)) {
    auto order = order_from_discrete(colors);
    std::string serialized = serialize_under(ctx, order);
    best.offer(std::move(serialized), std::move(order));
    return;
  }
  // First smallest non-singleton class; branch over every member.
  std::map<int, std::vector<size_t>> classes;
  for (size_t v = 0; v < colors.size(); ++v) classes[colors[v]].push_back(v);
  const std::vector<size_t>* target = nullptr;
  size_t target_size = colors.size() + 1;
  for (const auto& [c, members] : classes) {
    if (members.size() > 1 && members.size() < target_size) {
      target = &members;
      target_size = members.size();
    }
  }
  for (size_t v : *target) search(ctx, individualize(colors, v), best);
}

Best canonical_best(const CompositeGraph& graph) {
  CanonicalContext ctx(graph);
  size_t n = static_cast<size_t>(graph.node_count());
  Best best;
  if (n == 0) {
    best.offer("", {});
    return best;
  }
  // Initial colors from (type, param); structure enters via refinement.
  std::vector<std::pair<std::string, size_t>> initial(n);
  for (size_t v = 0; v < n; ++v)
    initial[v] = {node_invariant(graph, static_cast<NodeId>(v)), v};
  std::vector<std::string> keys;
  for (const auto& [k, v] : initial) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  Coloring colors(n);
  for (size_t v = 0; v < n; ++v)
    colors[v] = static_cast<int>(
        std::lower_bound(keys.begin(), keys.end(), initial[v].first) - keys.begin());

  search(ctx, std::move(colors), best);
  return best;
}

}  // namespace

std::vector<NodeId> canonical_order(const CompositeGraph& graph) {
  return canonical_best(graph).order;
}

bool alpha_equivalent(const CompositeGraph& a, const CompositeGraph& b) {
  if (a.registry_ptr() && b.registry_ptr() && !(a.registry() == b.registry()))
    fail(ErrorKind::Validation, "alpha_equivalent: graphs use different registries");
  if (a.node_count() != b.node_count() || a.edges().size() != b.edges().size()) return false;
  return canonical_best(a).serialization == canonical_best(b).serialization;
}

CompositeGraph canonicalize(const CompositeGraph& graph) {
  std::vector<NodeId> order = canonical_order(graph);
  std::vector<int> position(order.size());
  for (size_t i = 0; i < order.size(); ++i)
    position[static_cast<size_t>(order[i])] = static_cast<int>(i);

  GraphBuilder builder(graph.registry_ptr());
  for (NodeId id : order) builder.add_node(graph.node(id).type, graph.node(id).param);

  struct Rec {
    std::tuple<int, std::string, std::string, int, std::string> key;
    Endpoint from, to;
    std::string join;
  };
  std::vector<Rec> records;
  for (const Edge& e : graph.edges()) {
    int pf = position[static_cast<size_t>(e.from.node)];
    int pt = position[static_cast<size_t>(e.to.node)];
    std::string fp = e.from.port, tp = e.to.port;
    if (graph.registry().is_self_reverse(e.join) && std::tie(pt, tp) < std::tie(pf, fp)) {
      std::swap(pf, pt);
      std::swap(fp, tp);
    }
    records.push_back({{pf, fp, e.join, pt, tp}, {pf, fp}, {pt, tp}, e.join});
  }
  std::sort(records.begin(), records.end(),
            [](const Rec& x, const Rec& y) { return x.key < y.key; });
  int label = 0;
  for (const Rec& r : records) builder.add_edge(++label, r.join, r.from, r.to, false);
  return std::move(builder).build();
}

}  // namespace compose
