#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compose/notation.hpp"
#include "compose/rewrite.hpp"

namespace compose {

namespace {

struct Scanner {
  const std::string& text;
  size_t pos = 0;

  explicit Scanner(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool consume(const std::string& s) {
    if (text.compare(pos, s.size(), s) == 0) {
      pos += s.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& message) const {
    fail(ErrorKind::Syntax, message + " at offset " + std::to_string(pos));
  }

  std::string lex_upper_name() {
    if (pos >= text.size() || !std::isupper(static_cast<unsigned char>(text[pos])))
      error("expected object name");
    size_t start = pos++;
    while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  }
  std::string lex_lower_word() {
    if (pos >= text.size() || !std::islower(static_cast<unsigned char>(text[pos])))
      error("expected join name");
    size_t start = pos++;
    while (pos < text.size() &&
           (std::islower(static_cast<unsigned char>(text[pos])) ||
            std::isdigit(static_cast<unsigned char>(text[pos]))))
      ++pos;
    return text.substr(start, pos - start);
  }
  std::string lex_port_id() {
    size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '_'))
      ++pos;
    if (pos == start) error("expected port id");
    return text.substr(start, pos - start);
  }
  std::int64_t lex_int() {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) error("expected integer");
    if (pos - start > 18) error("integer literal too long");
    return std::stoll(text.substr(start, pos - start));
  }
};

struct RawIndex {
  bool reversed = false;
  std::string join;  // as written
  int label = 0;
  std::optional<std::string> port_override;
  bool superscript = true;
};

struct RawFactor {
  std::string name;
  std::optional<std::int64_t> param;
  std::vector<RawIndex> indices;  // written order across all groups
};

// index := '~'? JOIN INT ('@' PORTID)?   The JOIN/INT boundary is recovered
// by longest registered join name; e.g. "jht01" splits as jht0 | 1.
RawIndex lex_index(Scanner& s, const Registry& registry, bool superscript) {
  RawIndex idx;
  idx.superscript = superscript;
  idx.reversed = s.consume('~');
  size_t token_start = s.pos;
  std::string word = s.lex_lower_word();
  auto split = registry.split_join_label(word);
  if (!split) {
    s.pos = token_start;
    s.error("cannot resolve '" + word + "' as a registered join name plus label");
  }
  idx.join = split->first;
  idx.label = split->second;
  if (s.consume('@')) idx.port_override = s.lex_port_id();
  return idx;
}

RawFactor lex_factor(Scanner& s, const Registry& registry) {
  RawFactor f;
  f.name = s.lex_upper_name();
  if (s.consume('[')) {
    s.skip_ws();
    f.param = s.lex_int();
    s.skip_ws();
    if (!s.consume(']')) s.error("expected ']' after parameter");
  }
  for (;;) {
    s.skip_ws();
    bool superscript;
    if (s.consume("^{")) superscript = true;
    else if (s.consume("_{")) superscript = false;
    else break;
    s.skip_ws();
    if (s.peek() == '}') s.error("empty index group");
    while (!s.consume('}')) {
      f.indices.push_back(lex_index(s, registry, superscript));
      s.skip_ws();
    }
  }
  return f;
}

std::vector<RawFactor> lex_term(Scanner& s, const Registry& registry) {
  std::vector<RawFactor> factors;
  while (!s.done()) {
    char c = s.peek();
    if (!std::isupper(static_cast<unsigned char>(c))) break;
    factors.push_back(lex_factor(s, registry));
  }
  if (factors.empty()) s.error("expected at least one factor");
  return factors;
}

// Out side of the join as written: superscript for the plain spelling,
// subscript for the ~ spelling.
bool written_out_side(const RawIndex& idx) { return idx.superscript != idx.reversed; }

// Binds each factor's indices to ports: declared port order, first free port
// accepting the join with the right direction; '@' overrides.
std::vector<std::map<int, std::string>> bind_ports(const std::vector<RawFactor>& factors,
                                                   const Registry& registry) {
  std::vector<std::map<int, std::string>> bindings(factors.size());
  for (size_t fi = 0; fi < factors.size(); ++fi) {
    const RawFactor& f = factors[fi];
    const ObjectType& ot = registry.object_type(f.name);
    std::set<std::string> taken;
    for (const RawIndex& idx : f.indices) {
      const std::string canonical = registry.canonical_join(idx.join);
      bool self_rev = registry.is_self_reverse(idx.join);
      // Direction of the port this occurrence needs, in canonical terms.
      bool wants_out = written_out_side(idx) == registry.join(idx.join).canonical;
      PortDir want = wants_out ? PortDir::Out : PortDir::In;
      const Port* chosen = nullptr;
      if (idx.port_override) {
        const Port* p = ot.find_port(*idx.port_override);
        if (!p)
          fail(ErrorKind::Validation,
               "object type '" + f.name + "' has no port '" + *idx.port_override + "'");
        if (p->accepts != canonical || (!self_rev && p->direction != want))
          fail(ErrorKind::Validation, "port '" + p->id + "' of '" + f.name +
                                          "' does not accept this use of join '" + idx.join + "'");
        if (taken.count(p->id))
          fail(ErrorKind::Validation, "two indices compete for port '" + p->id + "' of '" +
                                          f.name + "'");
        chosen = p;
      } else {
        for (const Port& p : ot.ports) {
          if (p.accepts != canonical) continue;
          if (!self_rev && p.direction != want) continue;
          if (taken.count(p.id)) continue;
          chosen = &p;
          break;
        }
        if (!chosen)
          fail(ErrorKind::Validation, "no free port on '" + f.name + "' for join '" +
                                          (idx.reversed ? "~" : "") + idx.join + "'");
      }
      taken.insert(chosen->id);
      bindings[fi][idx.label] = chosen->id;
    }
  }
  return bindings;
}

CompositeGraph graph_from_factors(const std::vector<RawFactor>& factors,
                                  std::shared_ptr<const Registry> registry) {
  struct Occurrence {
    size_t factor;
    const RawIndex* index;
  };
  std::map<int, std::vector<Occurrence>> by_label;
  for (size_t fi = 0; fi < factors.size(); ++fi)
    for (const RawIndex& idx : factors[fi].indices)
      by_label[idx.label].push_back({fi, &idx});

  for (const auto& [label, occurrences] : by_label) {
    if (occurrences.size() != 2)
      fail(ErrorKind::Validation, "label " + std::to_string(label) + " appears " +
                                      std::to_string(occurrences.size()) + " times, expected 2");
    const RawIndex& a = *occurrences[0].index;
    const RawIndex& b = *occurrences[1].index;
    if (a.join != b.join || a.reversed != b.reversed)
      fail(ErrorKind::Validation, "label " + std::to_string(label) +
                                      " pairs mismatched join spellings");
    if (a.superscript == b.superscript)
      fail(ErrorKind::Validation, "label " + std::to_string(label) + " appears twice on the " +
                                      (a.superscript ? "superscript" : "subscript") + " side");
  }

  auto bindings = bind_ports(factors, *registry);

  GraphBuilder builder(registry);
  for (const RawFactor& f : factors) builder.add_node(f.name, f.param);
  for (const auto& [label, occurrences] : by_label) {
    const auto& first = occurrences[0];
    const auto& second = occurrences[1];
    const auto& out_occ = written_out_side(*first.index) ? first : second;
    const auto& in_occ = written_out_side(*first.index) ? second : first;
    Endpoint out_ep{static_cast<NodeId>(out_occ.factor),
                    bindings[out_occ.factor].at(label)};
    Endpoint in_ep{static_cast<NodeId>(in_occ.factor), bindings[in_occ.factor].at(label)};
    builder.add_edge(label, first.index->join, out_ep, in_ep, first.index->reversed);
  }
  return std::move(builder).build();
}

}  // namespace

CompositeGraph parse_tensorial(const std::string& text,
                               std::shared_ptr<const Registry> registry) {
  if (!registry) fail(ErrorKind::Internal, "parse_tensorial needs a registry");
  Scanner s(text);
  auto factors = lex_term(s, *registry);
  if (!s.done()) s.error("unexpected trailing input");
  return graph_from_factors(factors, registry);
}

// ---------------------------------------------------------------------------
// Bipartite notation
// ---------------------------------------------------------------------------

namespace {

struct NodeRef {
  std::string type;
  std::optional<std::int64_t> param;
  std::optional<int> occurrence;  // '#k', 1-based among leaves of this type
  std::string port;
};

struct RawBinding {
  bool reversed = false;
  std::string join;
  NodeRef left;
  NodeRef right;
};

struct ElementResult {
  BipartiteTree tree;
  std::vector<BipartiteTree::LeafData> leaves;  // left-to-right
};

NodeRef lex_node_ref(Scanner& s) {
  NodeRef ref;
  s.skip_ws();
  ref.type = s.lex_upper_name();
  if (s.consume('[')) {
    ref.param = s.lex_int();
    if (!s.consume(']')) s.error("expected ']' in node reference");
  }
  if (s.consume('#')) ref.occurrence = static_cast<int>(s.lex_int());
  if (!s.consume('.')) s.error("expected '.' before port id");
  ref.port = s.lex_port_id();
  return ref;
}

NodeId resolve_ref(const NodeRef& ref, const std::vector<BipartiteTree::LeafData>& leaves,
                   const char* side) {
  std::vector<NodeId> matches;
  for (const auto& leaf : leaves) {
    if (leaf.type != ref.type) continue;
    if (ref.param && leaf.param != ref.param) continue;
    matches.push_back(leaf.id);
  }
  if (matches.empty())
    fail(ErrorKind::Validation, std::string("binding references no ") + side +
                                    "-side instance of '" + ref.type + "'");
  if (ref.occurrence) {
    if (*ref.occurrence < 1 || static_cast<size_t>(*ref.occurrence) > matches.size())
      fail(ErrorKind::Validation, "reference '" + ref.type + "#" +
                                      std::to_string(*ref.occurrence) + "' is out of range");
    return matches[static_cast<size_t>(*ref.occurrence) - 1];
  }
  if (matches.size() > 1)
    fail(ErrorKind::Validation, "reference '" + ref.type +
                                    "' is ambiguous; disambiguate with #k");
  return matches[0];
}

ElementResult parse_element(Scanner& s, const std::shared_ptr<const Registry>& registry,
                            NodeId& next_id);

ElementResult parse_pair(Scanner& s, const std::shared_ptr<const Registry>& registry,
                         NodeId& next_id) {
  if (!s.consume('(')) s.error("expected '('");
  ElementResult left = parse_element(s, registry, next_id);
  s.skip_ws();
  if (!s.consume(',')) s.error("expected ',' between pair elements");
  ElementResult right = parse_element(s, registry, next_id);
  s.skip_ws();
  if (!s.consume(')')) s.error("expected ')'");
  s.skip_ws();
  if (!s.consume('@')) s.error("expected '@' after pair");
  s.skip_ws();

  JoinBundle bundle;
  if (s.consume('0')) {
    // null join
  } else if (s.consume('{')) {
    for (;;) {
      s.skip_ws();
      RawBinding rb;
      rb.reversed = s.consume('~');
      rb.join = s.lex_lower_word();
      s.skip_ws();
      if (!s.consume(':')) s.error("expected ':' after join name");
      rb.left = lex_node_ref(s);
      s.skip_ws();
      if (!s.consume("->")) s.error("expected '->' in binding");
      rb.right = lex_node_ref(s);

      const JoinType& jt = registry->join(rb.join);
      if (jt.is_null) fail(ErrorKind::Validation, "null joins take the '@0' form");
      BundleJoin bj;
      bj.join = registry->canonical_join(rb.join);
      bj.left = Endpoint{resolve_ref(rb.left, left.leaves, "left"), rb.left.port};
      bj.right = Endpoint{resolve_ref(rb.right, right.leaves, "right"), rb.right.port};
      bj.left_is_out = (jt.canonical != rb.reversed);
      bundle.joins.push_back(bj);

      s.skip_ws();
      if (s.consume(';')) continue;
      if (s.consume('}')) break;
      s.error("expected ';' or '}' in bundle");
    }
  } else {
    s.error("expected '0' or '{' after '@'");
  }

  ElementResult out;
  out.leaves = left.leaves;
  out.leaves.insert(out.leaves.end(), right.leaves.begin(), right.leaves.end());
  out.tree = BipartiteTree::node(std::move(left.tree), std::move(right.tree), std::move(bundle));
  return out;
}

// A term element becomes a left-nested chain; each step's bundle carries the
// term edges between the new factor and the ones before it.
ElementResult parse_term_element(Scanner& s, const std::shared_ptr<const Registry>& registry,
                                 NodeId& next_id) {
  std::vector<RawFactor> factors;
  for (;;) {
    s.skip_ws();
    if (!std::isupper(static_cast<unsigned char>(s.peek()))) break;
    factors.push_back(lex_factor(s, *registry));
  }
  if (factors.empty()) s.error("expected an object name or '('");

  CompositeGraph graph = graph_from_factors(factors, registry);
  NodeId base = next_id;
  next_id += graph.node_count();

  ElementResult out;
  for (NodeId i = 0; i < graph.node_count(); ++i)
    out.leaves.push_back({base + i, graph.node(i).type, graph.node(i).param});

  out.tree = BipartiteTree::leaf(out.leaves[0].id, out.leaves[0].type, out.leaves[0].param);
  for (NodeId i = 1; i < graph.node_count(); ++i) {
    JoinBundle bundle;
    for (const Edge& e : graph.edges()) {
      bool from_new = e.from.node == i, to_new = e.to.node == i;
      if (from_new == to_new) continue;  // both old or both new-less
      if (e.from.node > i || e.to.node > i) continue;
      BundleJoin bj;
      bj.join = e.join;
      bj.left_is_out = to_new;
      bj.left = Endpoint{base + (to_new ? e.from.node : e.to.node),
                         to_new ? e.from.port : e.to.port};
      bj.right = Endpoint{base + i, to_new ? e.to.port : e.from.port};
      bundle.joins.push_back(bj);
    }
    out.tree = BipartiteTree::node(
        std::move(out.tree),
        BipartiteTree::leaf(out.leaves[static_cast<size_t>(i)].id,
                            out.leaves[static_cast<size_t>(i)].type,
                            out.leaves[static_cast<size_t>(i)].param),
        std::move(bundle));
  }
  return out;
}

ElementResult parse_element(Scanner& s, const std::shared_ptr<const Registry>& registry,
                            NodeId& next_id) {
  s.skip_ws();
  if (s.peek() == '(') return parse_pair(s, registry, next_id);
  return parse_term_element(s, registry, next_id);
}

}  // namespace

BipartiteTree parse_bipartite(const std::string& text,
                              std::shared_ptr<const Registry> registry) {
  if (!registry) fail(ErrorKind::Internal, "parse_bipartite needs a registry");
  Scanner s(text);
  NodeId next_id = 0;
  ElementResult result = parse_element(s, registry, next_id);
  if (!s.done()) s.error("unexpected trailing input");
  // Leaves carry no registry; flatten validates bundles against it.
  flatten(result.tree, registry);
  return std::move(result.tree);
}

}  // namespace compose
