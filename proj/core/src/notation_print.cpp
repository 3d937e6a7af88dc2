#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

#include "compose/notation.hpp"
#include "compose/rewrite.hpp"

namespace compose {

namespace {

struct PrintedIndex {
  int label = 0;
  bool superscript = true;
  bool reversed = false;
  std::string join;        // written name (canonical; '~' carries reversal)
  std::string port;        // actual bound port
};

int declared_port_index(const ObjectType& ot, const std::string& port_id) {
  for (size_t i = 0; i < ot.ports.size(); ++i)
    if (ot.ports[i].id == port_id) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::string print_tensorial(const CompositeGraph& graph) {
  const Registry& reg = graph.registry();
  std::vector<NodeId> order = canonical_order(graph);
  std::vector<int> position(order.size());
  for (size_t i = 0; i < order.size(); ++i)
    position[static_cast<size_t>(order[i])] = static_cast<int>(i);

  // Renumber labels 1..E along the canonical edge order.
  std::vector<const Edge*> edges;
  for (const Edge& e : graph.edges()) edges.push_back(&e);
  auto edge_key = [&](const Edge* e) {
    const ObjectType& fo = reg.object_type(graph.node(e->from.node).type);
    const ObjectType& to = reg.object_type(graph.node(e->to.node).type);
    return std::tuple(position[static_cast<size_t>(e->from.node)],
                      declared_port_index(fo, e->from.port), e->join,
                      position[static_cast<size_t>(e->to.node)],
                      declared_port_index(to, e->to.port));
  };
  std::sort(edges.begin(), edges.end(),
            [&](const Edge* a, const Edge* b) { return edge_key(a) < edge_key(b); });

  std::vector<std::vector<PrintedIndex>> factor_indices(order.size());
  int next_label = 0;
  for (const Edge* e : edges) {
    ++next_label;
    factor_indices[static_cast<size_t>(position[static_cast<size_t>(e->from.node)])].push_back(
        {next_label, !e->described_reversed, e->described_reversed, e->join, e->from.port});
    factor_indices[static_cast<size_t>(position[static_cast<size_t>(e->to.node)])].push_back(
        {next_label, e->described_reversed, e->described_reversed, e->join, e->to.port});
  }

  std::ostringstream out;
  for (size_t pos = 0; pos < order.size(); ++pos) {
    const NodeData& node = graph.node(order[pos]);
    const ObjectType& ot = reg.object_type(node.type);
    if (pos) out << ' ';
    out << describe_instance(node);

    auto& indices = factor_indices[pos];
    std::sort(indices.begin(), indices.end(),
              [](const PrintedIndex& a, const PrintedIndex& b) { return a.label < b.label; });

    // Re-run the parser's default port resolution; add '@port' only where it
    // would pick a different port.
    std::set<std::string> taken;
    std::vector<std::string> rendered;
    for (const PrintedIndex& idx : indices) {
      bool wants_out = (idx.superscript != idx.reversed);
      PortDir want = wants_out ? PortDir::Out : PortDir::In;
      bool self_rev = reg.is_self_reverse(idx.join);
      const Port* by_default = nullptr;
      for (const Port& p : ot.ports) {
        if (p.accepts != idx.join) continue;
        if (!self_rev && p.direction != want) continue;
        if (taken.count(p.id)) continue;
        by_default = &p;
        break;
      }
      taken.insert(idx.port);
      std::string text = (idx.reversed ? "~" : "") + idx.join + std::to_string(idx.label);
      if (!by_default || by_default->id != idx.port) text += "@" + idx.port;
      rendered.push_back(std::move(text));
    }

    size_t i = 0;
    while (i < rendered.size()) {
      bool side = indices[i].superscript;
      out << (side ? "^{" : "_{");
      bool first = true;
      while (i < rendered.size() && indices[i].superscript == side) {
        if (!first) out << ' ';
        out << rendered[i];
        first = false;
        ++i;
      }
      out << '}';
    }
  }
  return out.str();
}

std::string to_dot(const CompositeGraph& graph) {
  std::ostringstream out;
  out << "digraph composite {\n";
  for (NodeId id = 0; id < graph.node_count(); ++id)
    out << "  n" << id << " [label=\"" << describe_instance(graph.node(id)) << "\"];\n";
  for (const Edge& e : graph.edges())
    out << "  n" << e.from.node << " -> n" << e.to.node << " [label=\"" << e.join << "\"];\n";
  int pseudo = 0;
  for (const FreePort& fp : graph.free_ports()) {
    std::string pid = "p" + std::to_string(pseudo++);
    out << "  " << pid << " [shape=point, label=\"\"];\n";
    if (fp.direction == PortDir::Out)
      out << "  n" << fp.node << " -> " << pid << " [label=\"" << fp.join
          << "\", style=dashed];\n";
    else
      out << "  " << pid << " -> n" << fp.node << " [label=\"" << fp.join
          << "\", style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace compose
