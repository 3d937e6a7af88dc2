#pragma once

#include <memory>
#include <string>

#include "compose/graph.hpp"
#include "compose/tree.hpp"

namespace compose {

/// Backend-owned value attached to an object, from which the properties of
/// interest are computed. Opaque to the core; backends downcast.
class GeneralizedState {
 public:
  virtual ~GeneralizedState() = default;
};

using StatePtr = std::shared_ptr<const GeneralizedState>;

/// A pluggable semantics for the evaluation fold. The three operations must
/// be pure functions of their arguments; that is the whole concurrency
/// contract. Inconsistency of a described object is a state, not an error:
/// backends report it through their state values so that evaluation is total
/// over every composition order.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string name() const = 0;

  /// Rejects graphs this backend cannot evaluate (unknown join or object
  /// types, missing tables, duplicate instance labels).
  virtual void validate_graph(const CompositeGraph& graph) const = 0;

  virtual StatePtr atomic_state(const CompositeGraph& graph, NodeId node) const = 0;

  /// Fold step for a composition (A,B)_alpha with a nonempty bundle.
  virtual StatePtr join_states(const StatePtr& left, const StatePtr& right,
                               const JoinBundle& bundle, const CompositeGraph& graph) const = 0;

  /// Fold step for the null join.
  virtual StatePtr disjoint_union(const StatePtr& left, const StatePtr& right) const = 0;

  /// State of the empty composite (unit of disjoint_union).
  virtual StatePtr empty_state() const = 0;

  /// Backend notion of state equality (exact for integer-valued backends,
  /// tolerance-based where floats are involved).
  virtual bool states_equal(const StatePtr& a, const StatePtr& b) const = 0;

  virtual std::string describe(const StatePtr& state) const = 0;

  /// JSON rendering of a state (serialized object text).
  virtual std::string state_json(const StatePtr& state) const = 0;
};

}  // namespace compose
