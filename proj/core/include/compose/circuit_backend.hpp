#pragma once

#include <map>
#include <string>
#include <vector>

#include "compose/backend.hpp"

namespace compose {

/// A dense real tensor table: one entry per object type, shape in declared
/// port order, data flat row-major.
struct TensorTable {
  struct Entry {
    std::vector<int> shape;
    std::vector<double> data;
  };
  std::map<std::string, Entry> tensors;
};

/// One free tensor index of a circuit state, tied to the port it came from.
struct IndexSpec {
  std::string join;       // canonical join type
  int dim = 1;
  PortDir direction = PortDir::Out;
  Endpoint binding;       // originating (node, port)
};

/// Generalized state for probabilistic circuits: a real tensor over the free
/// ports. Scalar when fully contracted.
class CircuitState : public GeneralizedState {
 public:
  CircuitState(std::vector<IndexSpec> indices, std::vector<double> data);

  const std::vector<IndexSpec>& indices() const { return indices_; }
  const std::vector<double>& data() const { return data_; }
  bool is_scalar() const { return indices_.empty(); }
  double scalar() const;

 private:
  std::vector<IndexSpec> indices_;
  std::vector<double> data_;
};

/// Joining is Einstein summation: multiply and sum over the paired indices.
/// The null join is the outer product. No physicality constraints are
/// enforced; reversed joins contract exactly like their forward form.
class CircuitBackend : public Backend {
 public:
  CircuitBackend(std::map<std::string, int> dims, TensorTable table,
                 double tolerance = 1e-9);

  std::string name() const override { return "circuit"; }
  void validate_graph(const CompositeGraph& graph) const override;
  StatePtr atomic_state(const CompositeGraph& graph, NodeId node) const override;
  StatePtr join_states(const StatePtr& left, const StatePtr& right, const JoinBundle& bundle,
                       const CompositeGraph& graph) const override;
  StatePtr disjoint_union(const StatePtr& left, const StatePtr& right) const override;
  StatePtr empty_state() const override;
  bool states_equal(const StatePtr& a, const StatePtr& b) const override;
  std::string describe(const StatePtr& state) const override;
  std::string state_json(const StatePtr& state) const override;

  int dim_of(const std::string& join) const;

 private:
  std::map<std::string, int> dims_;
  TensorTable table_;
  double tolerance_;
};

/// Elementwise relative closeness, the circuit notion of state equality.
bool nearly_equal(double a, double b, double tolerance);

}  // namespace compose
