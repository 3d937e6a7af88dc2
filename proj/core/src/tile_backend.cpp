#include "compose/tile_backend.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

namespace compose {

namespace {

std::string vec_text(Vec2 v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
}

const TileState& as_tile(const StatePtr& state) {
  auto* p = dynamic_cast<const TileState*>(state.get());
  if (!p) fail(ErrorKind::Internal, "state does not belong to the tile backend");
  return *p;
}

TileLabel tile_label(const CompositeGraph& graph, NodeId node) {
  const NodeData& n = graph.node(node);
  if (!n.param)
    fail(ErrorKind::Backend, "tile instances need a [label] parameter, '" + n.type +
                                 "' has none");
  return *n.param;
}

}  // namespace

TileState TileState::single(TileLabel n) {
  TileState s;
  s.pairs_[{n, n}] = Vec2{0, 0};
  return s;
}

std::vector<TileLabel> TileState::tiles() const {
  std::set<TileLabel> seen;
  for (const auto& [key, d] : pairs_) {
    (void)d;
    seen.insert(key.first);
    seen.insert(key.second);
  }
  return {seen.begin(), seen.end()};
}

bool TileState::has_tile(TileLabel n) const { return pairs_.count({n, n}) != 0; }

std::optional<Vec2> TileState::displacement(TileLabel from, TileLabel to) const {
  auto it = pairs_.find({from, to});
  if (it == pairs_.end()) return std::nullopt;
  return it->second;
}

std::vector<TileLabel> TileState::component_of(TileLabel member) const {
  std::vector<TileLabel> out;
  for (const auto& [key, d] : pairs_) {
    (void)d;
    if (key.first == member) out.push_back(key.second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void TileState::mark_inconsistent(std::string reason) {
  if (reason_.empty()) reason_ = std::move(reason);
}

void TileState::insert_pair(TileLabel m, TileLabel n, Vec2 d) {
  if (!consistent()) return;  // frozen after the first conflict
  if (m == n && !(d == Vec2{0, 0})) {
    mark_inconsistent("a join cycle around tile " + std::to_string(m) +
                      " does not close (offset " + vec_text(d) + ")");
    return;
  }
  if (m != n && d == Vec2{0, 0}) {
    mark_inconsistent("tiles " + std::to_string(m) + " and " + std::to_string(n) +
                      " would occupy the same position");
    return;
  }
  auto [it, inserted] = pairs_.insert({{m, n}, d});
  if (!inserted && !(it->second == d)) {
    mark_inconsistent("tiles " + std::to_string(m) + " and " + std::to_string(n) +
                      " get displacements " + vec_text(it->second) + " and " + vec_text(d));
    return;
  }
  if (m != n) {
    auto [rit, rinserted] = pairs_.insert({{n, m}, -d});
    if (!rinserted && !(rit->second == -d))
      mark_inconsistent("tiles " + std::to_string(n) + " and " + std::to_string(m) +
                        " get conflicting mirrored displacements");
  }
}

bool TileState::equals(const TileState& other) const {
  if (consistent() != other.consistent()) return false;
  if (!consistent()) return true;  // verdict equality; conflict sets are order-dependent
  return pairs_ == other.pairs_;
}

FiducialState compress(const TileState& state) {
  if (!state.consistent())
    fail(ErrorKind::Backend,
         "cannot compress an inconsistent state: " + state.inconsistency_reason());
  FiducialState out;
  std::set<TileLabel> done;
  for (TileLabel t : state.tiles()) {
    if (done.count(t)) continue;
    FiducialState::Component comp;
    comp.fiducial = t;  // smallest label first: tiles() is sorted
    for (TileLabel member : state.component_of(t)) {
      comp.offsets[member] = *state.displacement(t, member);
      done.insert(member);
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

TileState expand(const FiducialState& fiducial) {
  TileState out;
  for (const auto& comp : fiducial.components) {
    for (const auto& [m, dm] : comp.offsets)
      for (const auto& [n, dn] : comp.offsets) out.insert_pair(m, n, dn - dm);
  }
  return out;
}

std::optional<Vec2> tile_displacement(const TileState& state, TileLabel from, TileLabel to) {
  if (!state.has_tile(from) || !state.has_tile(to))
    fail(ErrorKind::Backend, "unknown tile label in displacement query");
  return state.displacement(from, to);
}

namespace {

std::pair<Vec2, Vec2> component_bounds(const TileState& state, TileLabel member) {
  if (!state.consistent())
    fail(ErrorKind::Backend, "geometry of an inconsistent state is undefined");
  if (!state.has_tile(member)) fail(ErrorKind::Backend, "unknown tile label");
  Vec2 lo{0, 0}, hi{0, 0};
  for (TileLabel t : state.component_of(member)) {
    Vec2 d = *state.displacement(member, t);
    lo.x = std::min(lo.x, d.x);
    lo.y = std::min(lo.y, d.y);
    hi.x = std::max(hi.x, d.x);
    hi.y = std::max(hi.y, d.y);
  }
  return {lo, hi};
}

}  // namespace

int component_width(const TileState& state, TileLabel member) {
  auto [lo, hi] = component_bounds(state, member);
  return hi.x - lo.x + 1;
}

int component_height(const TileState& state, TileLabel member) {
  auto [lo, hi] = component_bounds(state, member);
  return hi.y - lo.y + 1;
}

bool tiles_possible(const TileState& state) { return state.consistent(); }

TileBackend::TileBackend() : offsets_{{"x", Vec2{1, 0}}, {"y", Vec2{0, 1}}} {}

TileBackend::TileBackend(std::map<std::string, Vec2> offsets) : offsets_(std::move(offsets)) {}

void TileBackend::validate_graph(const CompositeGraph& graph) const {
  std::set<TileLabel> labels;
  for (NodeId id = 0; id < graph.node_count(); ++id) {
    TileLabel label = tile_label(graph, id);
    if (!labels.insert(label).second)
      fail(ErrorKind::Backend,
           "tile label " + std::to_string(label) + " appears more than once");
  }
  for (const Edge& e : graph.edges())
    if (!offsets_.count(e.join))
      fail(ErrorKind::Backend, "tile backend has no displacement for join '" + e.join + "'");
}

StatePtr TileBackend::atomic_state(const CompositeGraph& graph, NodeId node) const {
  return std::make_shared<TileState>(TileState::single(tile_label(graph, node)));
}

StatePtr TileBackend::join_states(const StatePtr& left, const StatePtr& right,
                                  const JoinBundle& bundle, const CompositeGraph& graph) const {
  const TileState& lhs = as_tile(left);
  const TileState& rhs = as_tile(right);

  for (TileLabel t : lhs.tiles())
    if (rhs.has_tile(t))
      fail(ErrorKind::Backend, "tile label " + std::to_string(t) + " appears on both sides");

  TileState merged = lhs;
  for (const auto& [key, d] : rhs.pairs()) merged.insert_pair(key.first, key.second, d);
  if (!rhs.consistent()) merged.mark_inconsistent(rhs.inconsistency_reason());

  for (const BundleJoin& bj : bundle.joins) {
    auto offset_it = offsets_.find(bj.join);
    if (offset_it == offsets_.end())
      fail(ErrorKind::Backend, "tile backend has no displacement for join '" + bj.join + "'");
    Vec2 offset = offset_it->second;
    TileLabel u = tile_label(graph, bj.out_endpoint().node);
    TileLabel v = tile_label(graph, bj.in_endpoint().node);
    if (!merged.consistent()) break;

    // All cross displacements this join establishes, over the pairs known so
    // far: (m,n) -> d(m,u) + offset + d(v,n). Later bundle joins see the
    // pairs added by earlier ones, which completes the additive closure.
    std::vector<std::tuple<TileLabel, TileLabel, Vec2>> additions;
    for (const auto& [mk, dm] : merged.pairs()) {
      if (mk.second != u) continue;
      for (const auto& [nk, dn] : merged.pairs()) {
        if (nk.first != v) continue;
        additions.emplace_back(mk.first, nk.second, dm + offset + dn);
      }
    }
    for (const auto& [m, n, d] : additions) merged.insert_pair(m, n, d);
  }
  return std::make_shared<TileState>(std::move(merged));
}

StatePtr TileBackend::disjoint_union(const StatePtr& left, const StatePtr& right) const {
  const TileState& lhs = as_tile(left);
  const TileState& rhs = as_tile(right);
  for (TileLabel t : lhs.tiles())
    if (rhs.has_tile(t))
      fail(ErrorKind::Backend,
           "tile label " + std::to_string(t) + " appears in both disjoint parts");
  TileState merged = lhs;
  for (const auto& [key, d] : rhs.pairs()) merged.insert_pair(key.first, key.second, d);
  if (!rhs.consistent()) merged.mark_inconsistent(rhs.inconsistency_reason());
  return std::make_shared<TileState>(std::move(merged));
}

StatePtr TileBackend::empty_state() const { return std::make_shared<TileState>(); }

bool TileBackend::states_equal(const StatePtr& a, const StatePtr& b) const {
  return as_tile(a).equals(as_tile(b));
}

std::string TileBackend::describe(const StatePtr& state) const {
  const TileState& s = as_tile(state);
  std::ostringstream out;
  if (s.consistent()) {
    FiducialState f = compress(s);
    for (size_t i = 0; i < f.components.size(); ++i) {
      const auto& comp = f.components[i];
      out << "component " << i + 1 << " (fiducial " << comp.fiducial << "):";
      for (const auto& [tile, d] : comp.offsets) out << ' ' << tile << ':' << vec_text(d);
      out << '\n';
    }
    out << "consistent: true";
  } else {
    out << "consistent: false\nreason: " << s.inconsistency_reason();
  }
  return out.str();
}

std::string TileBackend::state_json(const StatePtr& state) const {
  const TileState& s = as_tile(state);
  nlohmann::json j{{"consistent", s.consistent()}};
  if (s.consistent()) {
    nlohmann::json components = nlohmann::json::array();
    for (const auto& comp : compress(s).components) {
      nlohmann::json offsets = nlohmann::json::object();
      for (const auto& [tile, d] : comp.offsets)
        offsets[std::to_string(tile)] = {d.x, d.y};
      components.push_back({{"fiducial", comp.fiducial}, {"offsets", offsets}});
    }
    j["components"] = components;
  } else {
    j["reason"] = s.inconsistency_reason();
  }
  return j.dump();
}

}  // namespace compose
