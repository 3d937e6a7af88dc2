// compose: command-line front end for the composition engine.
//
// Subcommands: parse, check, canon, equiv, reverse, orders, prune, render,
// eval. Exit codes: 0 success, 1 usage/parse/validation error, 2 internal
// error, 3 (with --strict) object evaluated impossible or inconsistent.

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "compose/beam_backend.hpp"
#include "compose/circuit_backend.hpp"
#include "compose/io.hpp"
#include "compose/notation.hpp"
#include "compose/rewrite.hpp"
#include "compose/tile_backend.hpp"

namespace {

using nlohmann::json;
using namespace compose;

constexpr int kSchemaVersion = 1;

struct Options {
  std::string registry_path;
  std::string tensors_path;
  std::string rules_path;
  std::string format = "tensorial";
  std::string backend;
  std::string out_path;
  std::string keep;
  std::vector<std::string> inputs;
  int max_nodes = 8;
  int edge_label = 0;
  bool json_output = false;
  bool strict = false;
};

struct StrictFailure {
  std::string message;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + opt.out_path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

void emit_json(const Options& opt, json j) {
  j["schemaVersion"] = kSchemaVersion;
  emit(opt, j.dump(2));
}

std::shared_ptr<const Registry> registry_for(const Options& opt) {
  if (opt.registry_path.empty())
    fail(ErrorKind::Io, "this command needs --registry PATH");
  return load_registry(opt.registry_path);
}

// A parsed input: always a graph, plus the described order when the
// bipartite form was given.
struct ParsedInput {
  CompositeGraph graph;
  std::unique_ptr<BipartiteTree> order;
};

ParsedInput parse_input(const Options& opt, const std::string& path,
                        const std::shared_ptr<const Registry>& reg) {
  std::string text = read_file(path);
  ParsedInput out;
  if (opt.format == "bipartite") {
    out.order = std::make_unique<BipartiteTree>(parse_bipartite(text, reg));
    out.graph = flatten(*out.order, reg);
  } else if (opt.format == "tensorial") {
    out.graph = parse_tensorial(text, reg);
  } else {
    fail(ErrorKind::Io, "--format must be tensorial or bipartite");
  }
  return out;
}

std::unique_ptr<Backend> make_backend(const Options& opt, const Registry& reg) {
  if (opt.backend == "circuit") {
    std::map<std::string, int> dims = reg.dims;
    TensorTable table;
    if (!opt.tensors_path.empty()) {
      TensorTableFile file = load_tensor_table(opt.tensors_path);
      for (const auto& [join, d] : file.dims) {
        auto [it, inserted] = dims.insert({join, d});
        if (!inserted && it->second != d)
          fail(ErrorKind::Io,
               "dimension of '" + join + "' differs between registry and tensor table");
      }
      table = std::move(file.table);
    }
    if (table.tensors.empty())
      fail(ErrorKind::Io, "the circuit backend needs --tensors PATH");
    return std::make_unique<CircuitBackend>(std::move(dims), std::move(table));
  }
  if (opt.backend == "tile") return std::make_unique<TileBackend>();
  if (opt.backend == "beam") {
    if (reg.beam_lengths.empty())
      fail(ErrorKind::Io, "the beam backend needs \"beamLengths\" in the registry file");
    std::map<BeamId, int> lengths(reg.beam_lengths.begin(), reg.beam_lengths.end());
    return std::make_unique<BeamBackend>(std::move(lengths));
  }
  fail(ErrorKind::Io, "--backend must be circuit, tile, or beam");
}

bool state_acceptable(const StatePtr& state) {
  if (auto* tile = dynamic_cast<const TileState*>(state.get())) return tile->consistent();
  if (auto* bs = dynamic_cast<const BeamState*>(state.get())) return bs->possible_flag();
  return true;
}

json graph_json(const CompositeGraph& g) {
  json nodes = json::array();
  for (NodeId id = 0; id < g.node_count(); ++id) {
    json n{{"id", id}, {"type", g.node(id).type}};
    if (g.node(id).param) n["param"] = *g.node(id).param;
    nodes.push_back(n);
  }
  json edges = json::array();
  for (const Edge& e : g.edges())
    edges.push_back({{"label", e.label},
                     {"join", e.join},
                     {"from", {{"node", e.from.node}, {"port", e.from.port}}},
                     {"to", {{"node", e.to.node}, {"port", e.to.port}}},
                     {"reversed", e.described_reversed}});
  json free = json::array();
  for (const FreePort& fp : g.free_ports())
    free.push_back({{"node", fp.node},
                    {"port", fp.port},
                    {"join", fp.join},
                    {"dir", fp.direction == PortDir::Out ? "out" : "in"}});
  return json{{"nodes", nodes}, {"edges", edges}, {"freePorts", free}};
}

std::string free_port_text(const CompositeGraph& g) {
  std::ostringstream out;
  auto fps = g.free_ports();
  if (fps.empty()) {
    out << "free ports: none";
    return out.str();
  }
  out << "free ports:";
  for (const FreePort& fp : fps) {
    out << ' ' << describe_instance(g.node(fp.node)) << '.' << fp.port << ':'
        << (fp.direction == PortDir::Out ? fp.join : "~" + fp.join);
  }
  return out.str();
}

int cmd_parse(const Options& opt) {
  auto reg = registry_for(opt);
  auto input = parse_input(opt, opt.inputs.at(0), reg);
  if (opt.json_output) {
    json j = graph_json(input.graph);
    j["command"] = "parse";
    emit_json(opt, j);
    return 0;
  }
  std::ostringstream out;
  out << "objects: " << input.graph.node_count() << "\njoins: " << input.graph.edges().size()
      << "\ncomponents: " << input.graph.components().size() << '\n'
      << free_port_text(input.graph);
  emit(opt, out.str());
  return 0;
}

int cmd_check(const Options& opt) {
  auto reg = registry_for(opt);
  parse_input(opt, opt.inputs.at(0), reg);
  if (opt.json_output) emit_json(opt, json{{"command", "check"}, {"ok", true}});
  else emit(opt, "ok");
  return 0;
}

int cmd_canon(const Options& opt) {
  auto reg = registry_for(opt);
  auto input = parse_input(opt, opt.inputs.at(0), reg);
  std::string term = print_tensorial(canonicalize(input.graph));
  if (opt.json_output) emit_json(opt, json{{"command", "canon"}, {"term", term}});
  else emit(opt, term);
  return 0;
}

int cmd_equiv(const Options& opt) {
  auto reg = registry_for(opt);
  auto a = parse_input(opt, opt.inputs.at(0), reg);
  auto b = parse_input(opt, opt.inputs.at(1), reg);
  bool eq = alpha_equivalent(a.graph, b.graph);
  if (opt.json_output) emit_json(opt, json{{"command", "equiv"}, {"equivalent", eq}});
  else emit(opt, std::string("equivalent: ") + (eq ? "true" : "false"));
  return 0;
}

int cmd_reverse(const Options& opt) {
  auto reg = registry_for(opt);
  auto input = parse_input(opt, opt.inputs.at(0), reg);
  std::string term = print_tensorial(reverse_join(input.graph, opt.edge_label));
  if (opt.json_output) emit_json(opt, json{{"command", "reverse"}, {"term", term}});
  else emit(opt, term);
  return 0;
}

int cmd_orders(const Options& opt) {
  auto reg = registry_for(opt);
  auto input = parse_input(opt, opt.inputs.at(0), reg);
  auto trees = enumerate_orders(input.graph, opt.max_nodes);

  std::string canon = print_tensorial(canonicalize(input.graph));
  bool canonical_equal = true;
  for (const auto& tree : trees)
    if (print_tensorial(canonicalize(flatten(tree, reg))) != canon) canonical_equal = false;

  bool states_checked = false;
  bool states_equal = true;
  if (!opt.backend.empty() && !trees.empty()) {
    auto backend = make_backend(opt, *reg);
    states_checked = true;
    StatePtr reference = evaluate(input.graph, *backend, &trees.front());

    // Orders are independent computations over pure backends; farm the tail
    // out across threads and fold the comparisons deterministically.
    size_t workers = std::max<size_t>(1, std::thread::hardware_concurrency());
    std::vector<std::future<bool>> chunks;
    size_t chunk = std::max<size_t>(1, (trees.size() + workers - 1) / workers);
    for (size_t begin = 1; begin < trees.size(); begin += chunk) {
      size_t end = std::min(trees.size(), begin + chunk);
      chunks.push_back(std::async(std::launch::async, [&, begin, end] {
        for (size_t i = begin; i < end; ++i) {
          StatePtr s = evaluate(input.graph, *backend, &trees[i]);
          if (!backend->states_equal(reference, s)) return false;
        }
        return true;
      }));
    }
    for (auto& c : chunks) states_equal = c.get() && states_equal;
  }

  bool independent = canonical_equal && (!states_checked || states_equal);
  if (opt.json_output) {
    json j{{"command", "orders"},
           {"orders", trees.size()},
           {"canonicalEqual", canonical_equal},
           {"orderIndependent", independent}};
    if (states_checked) j["statesEqual"] = states_equal;
    emit_json(opt, j);
  } else {
    std::ostringstream out;
    out << "orders: " << trees.size()
        << "\ncanonical-equal: " << (canonical_equal ? "true" : "false") << '\n';
    if (states_checked) out << "states-equal: " << (states_equal ? "true" : "false") << '\n';
    out << "order-independent: " << (independent ? "true" : "false");
    emit(opt, out.str());
  }
  return 0;
}

int cmd_prune(const Options& opt) {
  auto reg = registry_for(opt);
  auto input = parse_input(opt, opt.inputs.at(0), reg);
  std::set<std::string> keep;
  std::stringstream ss(opt.keep);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) keep.insert(item);
  if (keep.empty()) fail(ErrorKind::Io, "prune needs --keep with a comma-separated join list");
  std::vector<ImplicationRule> rules;
  if (!opt.rules_path.empty()) rules = load_rules(opt.rules_path);

  std::string term = print_tensorial(prune(input.graph, keep, rules));
  if (opt.json_output) emit_json(opt, json{{"command", "prune"}, {"term", term}});
  else emit(opt, term);
  return 0;
}

int cmd_render(const Options& opt) {
  auto reg = registry_for(opt);
  auto input = parse_input(opt, opt.inputs.at(0), reg);
  std::string dot = to_dot(input.graph);
  if (opt.json_output) emit_json(opt, json{{"command", "render"}, {"dot", dot}});
  else emit(opt, dot);
  return 0;
}

int cmd_eval(const Options& opt) {
  auto reg = registry_for(opt);
  auto input = parse_input(opt, opt.inputs.at(0), reg);
  auto backend = make_backend(opt, *reg);
  StatePtr state = evaluate(input.graph, *backend, input.order.get());

  if (opt.json_output) {
    json j{{"command", "eval"},
           {"backend", backend->name()},
           {"state", json::parse(backend->state_json(state))}};
    emit_json(opt, j);
  } else {
    emit(opt, backend->describe(state));
  }
  if (opt.strict && !state_acceptable(state)) throw StrictFailure{backend->describe(state)};
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"composition-algebra engine: tensorial terms, order-independence checks, "
               "generalized-state evaluation"};
  app.require_subcommand(1);

  Options opt;
  std::string command;

  auto add_common = [&](CLI::App* sub, int n_inputs) {
    sub->add_option("--registry", opt.registry_path, "registry JSON file");
    sub->add_option("--format", opt.format, "input notation: tensorial|bipartite");
    sub->add_flag("--json", opt.json_output, "machine-readable output");
    sub->add_option("--out", opt.out_path, "write output to a file");
    sub->add_option("inputs", opt.inputs, "term file(s)")->expected(n_inputs);
    sub->callback([&, sub] { command = sub->get_name(); });
    return sub;
  };

  add_common(app.add_subcommand("parse", "parse a term and summarize its graph"), 1);
  add_common(app.add_subcommand("check", "validate a term file"), 1);
  add_common(app.add_subcommand("canon", "print the canonical tensorial form"), 1);
  add_common(app.add_subcommand("equiv", "decide alpha-equivalence of two terms"), 2);

  auto* reverse_cmd =
      add_common(app.add_subcommand("reverse", "re-describe one join in reverse"), 1);
  reverse_cmd->add_option("--edge", opt.edge_label, "label of the join to reverse")
      ->required();

  auto* orders_cmd = add_common(
      app.add_subcommand("orders", "enumerate composition orders and check independence"), 1);
  orders_cmd->add_option("--max-nodes", opt.max_nodes, "order-enumeration bound");
  orders_cmd->add_option("--backend", opt.backend, "also compare evaluated states");
  orders_cmd->add_option("--tensors", opt.tensors_path, "tensor table (circuit backend)");

  auto* prune_cmd =
      add_common(app.add_subcommand("prune", "drop joins outside a sufficient set"), 1);
  prune_cmd->add_option("--keep", opt.keep, "comma-separated join types to keep")->required();
  prune_cmd->add_option("--rules", opt.rules_path, "implication rules JSON");

  add_common(app.add_subcommand("render", "emit a Graphviz DOT transcription"), 1);

  auto* eval_cmd = add_common(app.add_subcommand("eval", "evaluate the generalized state"), 1);
  eval_cmd->add_option("--backend", opt.backend, "circuit|tile|beam")->required();
  eval_cmd->add_option("--tensors", opt.tensors_path, "tensor table (circuit backend)");
  eval_cmd->add_flag("--strict", opt.strict,
                     "exit 3 when the object is impossible or inconsistent");

  CLI11_PARSE(app, argc, argv);

  try {
    if (command == "parse") return cmd_parse(opt);
    if (command == "check") return cmd_check(opt);
    if (command == "canon") return cmd_canon(opt);
    if (command == "equiv") return cmd_equiv(opt);
    if (command == "reverse") return cmd_reverse(opt);
    if (command == "orders") return cmd_orders(opt);
    if (command == "prune") return cmd_prune(opt);
    if (command == "render") return cmd_render(opt);
    if (command == "eval") return cmd_eval(opt);
    std::cerr << "error: unknown command\n";
    return 1;
  } catch (const StrictFailure&) {
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Internal ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
