#pragma once

#include <memory>
#include <string>

#include "compose/graph.hpp"
#include "compose/tree.hpp"

namespace compose {

// Term grammar (ASCII):
//   term    := factor+
//   factor  := NAME param? group*
//   param   := '[' INT ']'
//   group   := '^{' index+ '}' | '_{' index+ '}'
//   index   := '~'? JOIN INT ('@' PORTID)?
//   NAME  = [A-Z][A-Za-z0-9]*   JOIN = [a-z][a-z0-9]*   INT = [0-9]+
// '~' spells the R-reversed description of a join. Every label must occur
// exactly twice, on opposite script sides, with the same join and flag.
// JOIN tokens are split from the trailing label by longest registered name.

/// Parses a tensorial term into its graph. One node per factor, one edge per
/// label pair; indices bind to ports in declared port order ('@' overrides).
CompositeGraph parse_tensorial(const std::string& text, std::shared_ptr<const Registry> registry);

/// Canonical text for a graph: nodes in canonical order, labels renumbered
/// 1..E, indices listed by label. parse(print(g)) is alpha-equivalent to g;
/// reversed-description joins keep their ~ spelling.
std::string print_tensorial(const CompositeGraph& graph);

// Bipartite grammar:
//   pair    := '(' element ',' element ')' '@' ( '0' | '{' binding (';' binding)* '}' )
//   element := pair | term
//   binding := '~'? JOIN ':' noderef '.' PORTID '->' noderef '.' PORTID
//   noderef := NAME param? ('#' INT)?
// The left noderef of a binding lies in the left element, the right one in
// the right element; '~' makes the right side the out side. '#k' picks the
// k-th leaf of that object type (left-to-right) when the bare name repeats.

/// Parses the bipartite notation into an order-carrying tree. A multi-factor
/// term element becomes a left-nested subtree over its own joins.
BipartiteTree parse_bipartite(const std::string& text, std::shared_ptr<const Registry> registry);

/// Graphviz DOT transcription: one node per instance, one labeled arrow per
/// join (out side to in side), point-shaped pseudo-nodes for free ports.
std::string to_dot(const CompositeGraph& graph);

}  // namespace compose
