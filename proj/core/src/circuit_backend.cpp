#include "compose/circuit_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace compose {

bool nearly_equal(double a, double b, double tolerance) {
  if (a == b) return true;
  double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= tolerance * scale;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

size_t total_size(const std::vector<IndexSpec>& indices) {
  size_t n = 1;
  for (const IndexSpec& idx : indices) n *= static_cast<size_t>(idx.dim);
  return n;
}

const CircuitState& as_circuit(const StatePtr& state) {
  auto* p = dynamic_cast<const CircuitState*>(state.get());
  if (!p) fail(ErrorKind::Internal, "state does not belong to the circuit backend");
  return *p;
}

}  // namespace

CircuitState::CircuitState(std::vector<IndexSpec> indices, std::vector<double> data)
    : indices_(std::move(indices)), data_(std::move(data)) {
  if (data_.size() != total_size(indices_))
    fail(ErrorKind::Backend, "tensor data length " + std::to_string(data_.size()) +
                                 " does not match the index dimensions");
  for (double v : data_)
    if (!std::isfinite(v)) fail(ErrorKind::Backend, "tensor entries must be finite");
}

double CircuitState::scalar() const {
  if (!is_scalar()) fail(ErrorKind::Backend, "state still has free indices");
  return data_[0];
}

CircuitBackend::CircuitBackend(std::map<std::string, int> dims, TensorTable table,
                               double tolerance)
    : dims_(std::move(dims)), table_(std::move(table)), tolerance_(tolerance) {
  for (const auto& [join, d] : dims_)
    if (d < 1)
      fail(ErrorKind::Backend, "dimension of join '" + join + "' must be >= 1, got " +
                                   std::to_string(d));
}

int CircuitBackend::dim_of(const std::string& join) const {
  auto it = dims_.find(join);
  if (it == dims_.end())
    fail(ErrorKind::Backend, "no dimension registered for join type '" + join + "'");
  return it->second;
}

void CircuitBackend::validate_graph(const CompositeGraph& graph) const {
  for (const NodeData& n : graph.nodes()) {
    if (!table_.tensors.count(n.type))
      fail(ErrorKind::Backend, "no tensor supplied for object type '" + n.type + "'");
  }
  for (NodeId id = 0; id < graph.node_count(); ++id) {
    const ObjectType& ot = graph.registry().object_type(graph.node(id).type);
    const TensorTable::Entry& entry = table_.tensors.at(ot.name);
    if (entry.shape.size() != ot.ports.size())
      fail(ErrorKind::Backend, "tensor for '" + ot.name + "' has rank " +
                                   std::to_string(entry.shape.size()) + ", expected " +
                                   std::to_string(ot.ports.size()));
    for (size_t i = 0; i < ot.ports.size(); ++i)
      if (entry.shape[i] != dim_of(ot.ports[i].accepts))
        fail(ErrorKind::Backend, "tensor shape for '" + ot.name + "' disagrees with join '" +
                                     ot.ports[i].accepts + "' at port '" + ot.ports[i].id + "'");
  }
}

StatePtr CircuitBackend::atomic_state(const CompositeGraph& graph, NodeId node) const {
  const NodeData& n = graph.node(node);
  const ObjectType& ot = graph.registry().object_type(n.type);
  auto it = table_.tensors.find(n.type);
  if (it == table_.tensors.end())
    fail(ErrorKind::Backend, "no tensor supplied for object type '" + n.type + "'");
  const TensorTable::Entry& entry = it->second;

  std::vector<IndexSpec> indices;
  size_t expected = 1;
  for (size_t i = 0; i < ot.ports.size(); ++i) {
    const Port& p = ot.ports[i];
    int d = dim_of(p.accepts);
    if (i < entry.shape.size() && entry.shape[i] != d)
      fail(ErrorKind::Backend, "tensor shape mismatch for '" + n.type + "'");
    indices.push_back(IndexSpec{p.accepts, d, p.direction, Endpoint{node, p.id}});
    expected *= static_cast<size_t>(d);
  }
  if (entry.shape.size() != ot.ports.size() || entry.data.size() != expected)
    fail(ErrorKind::Backend, "tensor for '" + n.type + "' does not match its port dimensions");
  return std::make_shared<CircuitState>(std::move(indices), entry.data);
}

StatePtr CircuitBackend::join_states(const StatePtr& left, const StatePtr& right,
                                     const JoinBundle& bundle,
                                     const CompositeGraph& graph) const {
  (void)graph;
  const CircuitState& lhs = as_circuit(left);
  const CircuitState& rhs = as_circuit(right);

  auto find_index = [](const CircuitState& s, const Endpoint& ep) -> int {
    for (size_t i = 0; i < s.indices().size(); ++i)
      if (s.indices()[i].binding == ep) return static_cast<int>(i);
    return -1;
  };

  // Paired index positions (left position, right position), one per bundle join.
  std::vector<std::pair<int, int>> contracted;
  for (const BundleJoin& bj : bundle.joins) {
    int li = find_index(lhs, bj.left);
    int ri = find_index(rhs, bj.right);
    if (li < 0 || ri < 0)
      fail(ErrorKind::Backend, "bundle references a port with no free index");
    const IndexSpec& l = lhs.indices()[static_cast<size_t>(li)];
    const IndexSpec& r = rhs.indices()[static_cast<size_t>(ri)];
    if (l.join != bj.join || r.join != bj.join)
      fail(ErrorKind::Backend, "bundle join type does not match the paired indices");
    if (l.direction == r.direction)
      fail(ErrorKind::Backend, "contraction must pair an out index with an in index");
    if (l.dim != r.dim) fail(ErrorKind::Backend, "contracted dimensions differ");
    for (const auto& [pl, pr] : contracted)
      if (pl == li || pr == ri)
        fail(ErrorKind::Backend, "two bundle joins contract the same index");
    contracted.push_back({li, ri});
  }

  std::vector<bool> l_contracted(lhs.indices().size(), false);
  std::vector<bool> r_contracted(rhs.indices().size(), false);
  for (const auto& [li, ri] : contracted) {
    l_contracted[static_cast<size_t>(li)] = true;
    r_contracted[static_cast<size_t>(ri)] = true;
  }

  std::vector<IndexSpec> out_indices;
  std::vector<int> l_free, r_free;
  for (size_t i = 0; i < lhs.indices().size(); ++i)
    if (!l_contracted[i]) {
      l_free.push_back(static_cast<int>(i));
      out_indices.push_back(lhs.indices()[i]);
    }
  for (size_t i = 0; i < rhs.indices().size(); ++i)
    if (!r_contracted[i]) {
      r_free.push_back(static_cast<int>(i));
      out_indices.push_back(rhs.indices()[i]);
    }

  auto strides = [](const std::vector<IndexSpec>& indices) {
    std::vector<size_t> s(indices.size(), 1);
    for (size_t i = indices.size(); i-- > 1;)
      s[i - 1] = s[i] * static_cast<size_t>(indices[i].dim);
    return s;
  };
  std::vector<size_t> l_strides = strides(lhs.indices());
  std::vector<size_t> r_strides = strides(rhs.indices());

  std::vector<double> out_data(total_size(out_indices), 0.0);
  std::vector<int> free_assign(out_indices.size(), 0);
  std::vector<int> sum_assign(contracted.size(), 0);

  // Dense loop over all free and contracted assignments; desk scale.
  size_t out_pos = 0;
  do {
    size_t l_base = 0, r_base = 0;
    for (size_t i = 0; i < l_free.size(); ++i)
      l_base += static_cast<size_t>(free_assign[i]) * l_strides[static_cast<size_t>(l_free[i])];
    for (size_t i = 0; i < r_free.size(); ++i)
      r_base += static_cast<size_t>(free_assign[l_free.size() + i]) *
                r_strides[static_cast<size_t>(r_free[i])];

    double sum = 0.0;
    std::fill(sum_assign.begin(), sum_assign.end(), 0);
    for (;;) {
      size_t l_off = l_base, r_off = r_base;
      for (size_t k = 0; k < contracted.size(); ++k) {
        l_off += static_cast<size_t>(sum_assign[k]) *
                 l_strides[static_cast<size_t>(contracted[k].first)];
        r_off += static_cast<size_t>(sum_assign[k]) *
                 r_strides[static_cast<size_t>(contracted[k].second)];
      }
      sum += lhs.data()[l_off] * rhs.data()[r_off];

      size_t k = contracted.size();
      while (k > 0) {
        int dim = lhs.indices()[static_cast<size_t>(contracted[k - 1].first)].dim;
        if (++sum_assign[k - 1] < dim) break;
        sum_assign[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
    out_data[out_pos++] = sum;

    size_t i = out_indices.size();
    while (i > 0) {
      if (++free_assign[i - 1] < out_indices[i - 1].dim) break;
      free_assign[i - 1] = 0;
      --i;
    }
    if (i == 0) break;
  } while (true);

  return std::make_shared<CircuitState>(std::move(out_indices), std::move(out_data));
}

StatePtr CircuitBackend::disjoint_union(const StatePtr& left, const StatePtr& right) const {
  const CircuitState& lhs = as_circuit(left);
  const CircuitState& rhs = as_circuit(right);
  std::vector<IndexSpec> indices = lhs.indices();
  indices.insert(indices.end(), rhs.indices().begin(), rhs.indices().end());
  std::vector<double> data;
  data.reserve(lhs.data().size() * rhs.data().size());
  for (double a : lhs.data())
    for (double b : rhs.data()) data.push_back(a * b);
  return std::make_shared<CircuitState>(std::move(indices), std::move(data));
}

StatePtr CircuitBackend::empty_state() const {
  return std::make_shared<CircuitState>(std::vector<IndexSpec>{}, std::vector<double>{1.0});
}

bool CircuitBackend::states_equal(const StatePtr& a, const StatePtr& b) const {
  const CircuitState& lhs = as_circuit(a);
  const CircuitState& rhs = as_circuit(b);
  if (lhs.indices().size() != rhs.indices().size()) return false;

  // Match free indices by originating port, independent of their order.
  std::vector<int> perm;  // rhs position for each lhs position
  for (const IndexSpec& l : lhs.indices()) {
    int found = -1;
    for (size_t j = 0; j < rhs.indices().size(); ++j) {
      const IndexSpec& r = rhs.indices()[j];
      if (r.binding == l.binding && r.join == l.join && r.dim == l.dim &&
          r.direction == l.direction) {
        found = static_cast<int>(j);
        break;
      }
    }
    if (found < 0) return false;
    perm.push_back(found);
  }

  auto strides = [](const std::vector<IndexSpec>& indices) {
    std::vector<size_t> s(indices.size(), 1);
    for (size_t i = indices.size(); i-- > 1;)
      s[i - 1] = s[i] * static_cast<size_t>(indices[i].dim);
    return s;
  };
  std::vector<size_t> rs = strides(rhs.indices());

  std::vector<int> assign(lhs.indices().size(), 0);
  size_t lpos = 0;
  for (;;) {
    size_t rpos = 0;
    for (size_t i = 0; i < assign.size(); ++i)
      rpos += static_cast<size_t>(assign[i]) * rs[static_cast<size_t>(perm[i])];
    if (!nearly_equal(lhs.data()[lpos], rhs.data()[rpos], tolerance_)) return false;
    ++lpos;
    size_t i = assign.size();
    while (i > 0) {
      if (++assign[i - 1] < lhs.indices()[i - 1].dim) break;
      assign[i - 1] = 0;
      --i;
    }
    if (i == 0) break;
  }
  return lpos == lhs.data().size();
}

std::string CircuitBackend::describe(const StatePtr& state) const {
  const CircuitState& s = as_circuit(state);
  std::ostringstream out;
  if (s.is_scalar()) {
    out << "value: " << format_number(s.scalar());
    return out.str();
  }
  out << "free indices:";
  for (const IndexSpec& idx : s.indices())
    out << ' ' << idx.join << (idx.direction == PortDir::Out ? "^" : "_") << '('
        << idx.binding.node << '.' << idx.binding.port << ')';
  out << "\ndata:";
  for (double v : s.data()) out << ' ' << format_number(v);
  return out.str();
}

std::string CircuitBackend::state_json(const StatePtr& state) const {
  const CircuitState& s = as_circuit(state);
  nlohmann::json indices = nlohmann::json::array();
  for (const IndexSpec& idx : s.indices())
    indices.push_back({{"join", idx.join},
                       {"dim", idx.dim},
                       {"dir", idx.direction == PortDir::Out ? "out" : "in"},
                       {"node", idx.binding.node},
                       {"port", idx.binding.port}});
  nlohmann::json j{{"indices", indices}, {"data", s.data()}};
  if (s.is_scalar()) j["value"] = s.scalar();
  return j.dump();
}

}  // namespace compose
