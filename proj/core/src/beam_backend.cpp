#include "compose/beam_backend.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

namespace compose {

namespace {

std::string vec_text(Vec3 v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + "," + std::to_string(v.z) + ")";
}

Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
int dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

const BeamState& as_beam(const StatePtr& state) {
  auto* p = dynamic_cast<const BeamState*>(state.get());
  if (!p) fail(ErrorKind::Internal, "state does not belong to the beam backend");
  return *p;
}

}  // namespace

Rot3::Rot3() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Rot3 Rot3::from_rows(std::array<int, 3> r0, std::array<int, 3> r1, std::array<int, 3> r2) {
  Rot3 r;
  r.m_ = {r0[0], r0[1], r0[2], r1[0], r1[1], r1[2], r2[0], r2[1], r2[2]};
  return r;
}

Vec3 Rot3::apply(Vec3 v) const {
  return {at(0, 0) * v.x + at(0, 1) * v.y + at(0, 2) * v.z,
          at(1, 0) * v.x + at(1, 1) * v.y + at(1, 2) * v.z,
          at(2, 0) * v.x + at(2, 1) * v.y + at(2, 2) * v.z};
}

Rot3 Rot3::then(const Rot3& other) const {
  Rot3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int sum = 0;
      for (int k = 0; k < 3; ++k) sum += at(i, k) * other.at(k, j);
      r.m_[static_cast<size_t>(i * 3 + j)] = sum;
    }
  return r;
}

Rot3 Rot3::inverse() const {
  Rot3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m_[static_cast<size_t>(i * 3 + j)] = at(j, i);
  return r;
}

int Rot3::determinant() const {
  return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
         at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
         at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

bool Rot3::orthogonal() const {
  Rot3 prod = then(inverse());
  return prod == Rot3();
}

const std::vector<Rot3>& Rot3::group() {
  static const std::vector<Rot3> cached = [] {
    // Closure of the two 90-degree generators; lands on all 24 elements.
    Rot3 rx = Rot3::from_rows({1, 0, 0}, {0, 0, -1}, {0, 1, 0});
    Rot3 rz = Rot3::from_rows({0, -1, 0}, {1, 0, 0}, {0, 0, 1});
    std::set<Rot3> seen{Rot3()};
    std::vector<Rot3> frontier{Rot3()};
    while (!frontier.empty()) {
      std::vector<Rot3> next;
      for (const Rot3& r : frontier)
        for (const Rot3& g : {rx, rz}) {
          Rot3 candidate = r.then(g);
          if (seen.insert(candidate).second) next.push_back(candidate);
        }
      frontier = std::move(next);
    }
    return std::vector<Rot3>(seen.begin(), seen.end());
  }();
  return cached;
}

Pose Pose::then(const Pose& inner) const {
  return Pose{rotation.then(inner.rotation), rotation.apply(inner.translation) + translation};
}

Pose Pose::inverse() const {
  Rot3 rinv = rotation.inverse();
  return Pose{rinv, -rinv.apply(translation)};
}

// 90-degree right-handed rotation about a unit axis: R v = a (a.v) + a x v.
static Rot3 axis_rot90(Vec3 axis) {
  Vec3 cols[3];
  Vec3 basis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 3; ++i) {
    Vec3 v = basis[i];
    int proj = dot(axis, v);
    Vec3 c = cross(axis, v);
    cols[i] = Vec3{axis.x * proj + c.x, axis.y * proj + c.y, axis.z * proj + c.z};
  }
  return Rot3::from_rows({cols[0].x, cols[1].x, cols[2].x}, {cols[0].y, cols[1].y, cols[2].y},
                         {cols[0].z, cols[1].z, cols[2].z});
}

std::string BeamBackend::join_name(const BeamJoinSpec& spec) {
  std::string s = "j";
  s += spec.end_a == BeamEnd::Head ? 'h' : 't';
  s += spec.end_b == BeamEnd::Head ? 'h' : 't';
  s += static_cast<char>('0' + spec.twist);
  return s;
}

std::optional<BeamJoinSpec> BeamBackend::parse_join_name(const std::string& name) {
  if (name.size() != 4 || name[0] != 'j') return std::nullopt;
  auto end_of = [](char c) -> std::optional<BeamEnd> {
    if (c == 'h') return BeamEnd::Head;
    if (c == 't') return BeamEnd::Tail;
    return std::nullopt;
  };
  auto ea = end_of(name[1]);
  auto eb = end_of(name[2]);
  if (!ea || !eb || name[3] < '0' || name[3] > '3') return std::nullopt;
  return BeamJoinSpec{*ea, *eb, name[3] - '0'};
}

Pose BeamBackend::relative_pose(const BeamJoinSpec& spec, int length_a, int length_b) {
  Vec3 end_a = spec.end_a == BeamEnd::Head ? Vec3{length_a - 1, 0, 0} : Vec3{0, 0, 0};
  Vec3 outward = spec.end_a == BeamEnd::Head ? Vec3{1, 0, 0} : Vec3{-1, 0, 0};
  Vec3 corner = end_a + outward;

  // The twist picks one of the four directions perpendicular to A's axis:
  // base +y rotated about the outward direction.
  Vec3 body_dir{0, 1, 0};
  for (int i = 0; i < spec.twist; ++i) body_dir = axis_rot90(outward).apply(body_dir);

  // B's own axis points tail-to-head, so it runs along the body direction
  // when the tail is joined and against it when the head is.
  Vec3 axis_dir = spec.end_b == BeamEnd::Tail ? body_dir : -body_dir;
  Rot3 rotation = axis_rot90(cross(Vec3{1, 0, 0}, axis_dir));

  Vec3 end_b = spec.end_b == BeamEnd::Head ? Vec3{length_b - 1, 0, 0} : Vec3{0, 0, 0};
  Vec3 translation = corner - rotation.apply(end_b);
  return Pose{rotation, translation};
}

BeamState BeamState::single(BeamId id, int length) {
  BeamState s;
  s.components_.push_back(Component{{{id, Pose{}}}});
  s.lengths_[id] = length;
  return s;
}

void BeamState::mark_impossible(std::string reason) {
  if (reason_.empty()) reason_ = std::move(reason);
}

bool BeamState::has_beam(BeamId id) const { return lengths_.count(id) != 0; }

int BeamState::component_index_of(BeamId id) const {
  for (size_t i = 0; i < components_.size(); ++i)
    if (components_[i].poses.count(id)) return static_cast<int>(i);
  return -1;
}

std::vector<Vec3> BeamState::cells(const Pose& pose, int length) {
  std::vector<Vec3> out;
  out.reserve(static_cast<size_t>(length));
  for (int i = 0; i < length; ++i) out.push_back(pose.apply({i, 0, 0}));
  return out;
}

void BeamState::normalize_fiducials() {
  for (Component& comp : components_) {
    if (comp.poses.empty()) continue;
    Pose base = comp.poses.begin()->second.inverse();  // smallest id: map order
    for (auto& [id, pose] : comp.poses) pose = base.then(pose);
  }
  std::sort(components_.begin(), components_.end(), [](const Component& a, const Component& b) {
    return a.poses.begin()->first < b.poses.begin()->first;
  });
}

bool BeamState::equals(const BeamState& other) const {
  if (possible_flag() != other.possible_flag()) return false;
  if (!possible_flag()) return true;  // verdict equality
  if (lengths_ != other.lengths_) return false;
  BeamState a = *this, b = other;
  a.normalize_fiducials();
  b.normalize_fiducials();
  if (a.components_.size() != b.components_.size()) return false;
  for (size_t i = 0; i < a.components_.size(); ++i)
    if (a.components_[i].poses != b.components_[i].poses) return false;
  return true;
}

BeamBackend::BeamBackend(std::map<BeamId, int> lengths) : lengths_(std::move(lengths)) {
  for (const auto& [id, length] : lengths_)
    if (length < 1)
      fail(ErrorKind::Backend, "beam " + std::to_string(id) + " has nonpositive length " +
                                   std::to_string(length));
}

void BeamBackend::validate_graph(const CompositeGraph& graph) const {
  std::set<BeamId> ids;
  for (NodeId id = 0; id < graph.node_count(); ++id) {
    const NodeData& n = graph.node(id);
    if (!n.param)
      fail(ErrorKind::Backend, "beam instances need an [id] parameter");
    if (!lengths_.count(*n.param))
      fail(ErrorKind::Backend, "no length registered for beam " + std::to_string(*n.param));
    if (!ids.insert(*n.param).second)
      fail(ErrorKind::Backend,
           "beam id " + std::to_string(*n.param) + " appears more than once");
  }
  for (const Edge& e : graph.edges())
    if (!parse_join_name(e.join))
      fail(ErrorKind::Backend, "'" + e.join + "' is not a beam join (expected jHTt form)");
}

StatePtr BeamBackend::atomic_state(const CompositeGraph& graph, NodeId node) const {
  const NodeData& n = graph.node(node);
  if (!n.param) fail(ErrorKind::Backend, "beam instances need an [id] parameter");
  auto it = lengths_.find(*n.param);
  if (it == lengths_.end())
    fail(ErrorKind::Backend, "no length registered for beam " + std::to_string(*n.param));
  if (it->second < 1) fail(ErrorKind::Backend, "beam length must be positive");
  return std::make_shared<BeamState>(BeamState::single(*n.param, it->second));
}

namespace {

void check_overlaps(BeamState& state, const BeamState::Component& comp) {
  std::vector<std::pair<BeamId, std::vector<Vec3>>> placed;
  for (const auto& [id, pose] : comp.poses)
    placed.push_back({id, BeamState::cells(pose, state.lengths().at(id))});
  for (size_t i = 0; i < placed.size() && state.possible_flag(); ++i)
    for (size_t j = i + 1; j < placed.size() && state.possible_flag(); ++j)
      for (const Vec3& cell : placed[i].second)
        if (std::find(placed[j].second.begin(), placed[j].second.end(), cell) !=
            placed[j].second.end()) {
          state.mark_impossible("beams " + std::to_string(placed[i].first) + " and " +
                                std::to_string(placed[j].first) + " overlap at cell " +
                                vec_text(cell));
          break;
        }
}

BeamState merge_states(const BeamState& lhs, const BeamState& rhs) {
  BeamState merged = lhs;
  for (const auto& [id, length] : rhs.lengths()) {
    if (merged.lengths().count(id))
      fail(ErrorKind::Backend, "beam id " + std::to_string(id) + " appears on both sides");
    merged.lengths_mut()[id] = length;
  }
  for (const auto& comp : rhs.components()) merged.components_mut().push_back(comp);
  if (!rhs.possible_flag()) merged.mark_impossible(rhs.impossibility_reason());
  return merged;
}

}  // namespace

StatePtr BeamBackend::join_states(const StatePtr& left, const StatePtr& right,
                                  const JoinBundle& bundle, const CompositeGraph& graph) const {
  const BeamState& lhs = as_beam(left);
  const BeamState& rhs = as_beam(right);
  BeamState merged = merge_states(lhs, rhs);

  for (const BundleJoin& bj : bundle.joins) {
    if (!merged.possible_flag()) break;
    auto spec = parse_join_name(bj.join);
    if (!spec)
      fail(ErrorKind::Backend, "'" + bj.join + "' is not a beam join (expected jHTt form)");

    const NodeData& anode = graph.node(bj.out_endpoint().node);
    const NodeData& bnode = graph.node(bj.in_endpoint().node);
    if (!anode.param || !bnode.param)
      fail(ErrorKind::Backend, "beam instances need an [id] parameter");
    BeamId a = *anode.param, b = *bnode.param;

    int ca = merged.component_index_of(a);
    int cb = merged.component_index_of(b);
    if (ca < 0 || cb < 0) fail(ErrorKind::Backend, "bundle references an unknown beam");

    Pose pose_a = merged.components()[static_cast<size_t>(ca)].poses.at(a);
    Pose required =
        pose_a.then(relative_pose(*spec, merged.lengths().at(a), merged.lengths().at(b)));

    if (ca == cb) {
      // A cycle: the join must reproduce the existing placement exactly.
      const Pose& current = merged.components()[static_cast<size_t>(ca)].poses.at(b);
      if (!(current == required)) {
        merged.mark_impossible("join cycle through beams " + std::to_string(a) + " and " +
                               std::to_string(b) + " does not close");
      }
      continue;
    }

    Pose rebase = required.then(merged.components()[static_cast<size_t>(cb)].poses.at(b).inverse());
    auto& target = merged.components_mut()[static_cast<size_t>(ca)];
    for (const auto& [id, pose] : merged.components()[static_cast<size_t>(cb)].poses)
      target.poses[id] = rebase.then(pose);
    merged.components_mut().erase(merged.components_mut().begin() + cb);
    if (cb < ca) --ca;
    check_overlaps(merged, merged.components()[static_cast<size_t>(ca)]);
  }
  return std::make_shared<BeamState>(std::move(merged));
}

StatePtr BeamBackend::disjoint_union(const StatePtr& left, const StatePtr& right) const {
  return std::make_shared<BeamState>(merge_states(as_beam(left), as_beam(right)));
}

StatePtr BeamBackend::empty_state() const { return std::make_shared<BeamState>(); }

bool BeamBackend::states_equal(const StatePtr& a, const StatePtr& b) const {
  return as_beam(a).equals(as_beam(b));
}

int BeamBackend::possible(const BeamState& state) { return state.possible_flag() ? 1 : 0; }

std::string BeamBackend::describe(const StatePtr& state) const {
  const BeamState& s = as_beam(state);
  std::ostringstream out;
  out << "possible: " << (s.possible_flag() ? "true" : "false");
  if (!s.possible_flag()) {
    out << "\nreason: " << s.impossibility_reason();
    return out.str();
  }
  BeamState norm = s;
  norm.normalize_fiducials();
  size_t index = 0;
  for (const auto& comp : norm.components()) {
    out << "\ncomponent " << ++index << " (fiducial "
        << comp.poses.begin()->first << "):";
    for (const auto& [id, pose] : comp.poses) {
      int length = norm.lengths().at(id);
      out << "\n  beam " << id << ": tail " << vec_text(pose.apply({0, 0, 0})) << " head "
          << vec_text(pose.apply({length - 1, 0, 0}));
    }
  }
  return out.str();
}

std::string BeamBackend::state_json(const StatePtr& state) const {
  const BeamState& s = as_beam(state);
  nlohmann::json j{{"possible", s.possible_flag()}};
  if (!s.possible_flag()) {
    j["reason"] = s.impossibility_reason();
    return j.dump();
  }
  BeamState norm = s;
  norm.normalize_fiducials();
  nlohmann::json components = nlohmann::json::array();
  for (const auto& comp : norm.components()) {
    nlohmann::json beams = nlohmann::json::object();
    for (const auto& [id, pose] : comp.poses) {
      int length = norm.lengths().at(id);
      Vec3 tail = pose.apply({0, 0, 0});
      Vec3 head = pose.apply({length - 1, 0, 0});
      beams[std::to_string(id)] = {{"tail", {tail.x, tail.y, tail.z}},
                                   {"head", {head.x, head.y, head.z}}};
    }
    components.push_back({{"fiducial", comp.poses.begin()->first}, {"beams", beams}});
  }
  j["components"] = components;
  return j.dump();
}

Registry make_beam_registry(const std::map<BeamId, int>& lengths) {
  Registry reg;
  reg.add_join_type("0", "0", true);
  std::vector<Port> ports;
  for (BeamEnd ea : {BeamEnd::Head, BeamEnd::Tail}) {
    for (BeamEnd eb : {BeamEnd::Head, BeamEnd::Tail}) {
      for (int twist = 0; twist < 4; ++twist) {
        std::string name = BeamBackend::join_name({ea, eb, twist});
        reg.add_join_type(name, name + "r", false);
        ports.push_back(Port{name + "o", name, PortDir::Out});
        ports.push_back(Port{name + "i", name, PortDir::In});
      }
    }
  }
  reg.add_object_type("Beam", true, std::move(ports));
  reg.beam_lengths = std::map<std::int64_t, int>(lengths.begin(), lengths.end());
  reg.validate();
  return reg;
}

}  // namespace compose
