#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compose/backend.hpp"

namespace compose {

struct Vec3 {
  int x = 0;
  int y = 0;
  int z = 0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend bool operator==(Vec3 a, Vec3 b) = default;
  friend auto operator<=>(Vec3 a, Vec3 b) = default;
};

/// Integer 3x3 rotation matrix from the 24-element rotation group of the
/// cube: entries in {-1,0,1}, orthogonal, determinant +1.
class Rot3 {
 public:
  Rot3();  // identity
  static Rot3 from_rows(std::array<int, 3> r0, std::array<int, 3> r1, std::array<int, 3> r2);

  /// The full group, generated once by closure and cached (24 elements).
  static const std::vector<Rot3>& group();

  Vec3 apply(Vec3 v) const;
  Rot3 then(const Rot3& other) const;  // this * other (apply other first)
  Rot3 inverse() const;                // transpose
  int determinant() const;
  bool orthogonal() const;

  friend bool operator==(const Rot3& a, const Rot3& b) = default;
  friend auto operator<=>(const Rot3& a, const Rot3& b) = default;

  int at(int row, int col) const { return m_[static_cast<size_t>(row * 3 + col)]; }

 private:
  std::array<int, 9> m_;
};

/// Exact rigid placement on the integer lattice.
struct Pose {
  Rot3 rotation;
  Vec3 translation;

  Vec3 apply(Vec3 v) const { return rotation.apply(v) + translation; }
  Pose then(const Pose& inner) const;  // this âˆ˜ inner
  Pose inverse() const;

  friend bool operator==(const Pose& a, const Pose& b) = default;
  friend auto operator<=>(const Pose& a, const Pose& b) = default;
};

enum class BeamEnd { Head, Tail };

/// Parameters of a right-angle end-to-end join: which end of each beam meets
/// and which of the four perpendicular directions the second beam leaves in.
struct BeamJoinSpec {
  BeamEnd end_a = BeamEnd::Head;
  BeamEnd end_b = BeamEnd::Tail;
  int twist = 0;  // 0..3
};

using BeamId = std::int64_t;

/// Generalized state for Penrose-style beam assemblies: per connected part,
/// exact poses relative to a fiducial member, plus a possible/impossible
/// verdict. A beam of length L occupies cells (0..L-1, 0, 0) in its own
/// frame; tail cell at the origin, head cell at (L-1, 0, 0).
class BeamState : public GeneralizedState {
 public:
  struct Component {
    std::map<BeamId, Pose> poses;  // fiducial member carries the identity
  };

  static BeamState single(BeamId id, int length);

  bool possible_flag() const { return reason_.empty(); }
  const std::string& impossibility_reason() const { return reason_; }
  void mark_impossible(std::string reason);

  const std::vector<Component>& components() const { return components_; }
  std::vector<Component>& components_mut() { return components_; }
  const std::map<BeamId, int>& lengths() const { return lengths_; }
  std::map<BeamId, int>& lengths_mut() { return lengths_; }

  bool has_beam(BeamId id) const;
  int component_index_of(BeamId id) const;  // -1 if absent

  /// Occupied cells of one beam under a pose.
  static std::vector<Vec3> cells(const Pose& pose, int length);

  /// Re-bases every component so its smallest beam id has the identity pose.
  void normalize_fiducials();

  bool equals(const BeamState& other) const;

 private:
  std::vector<Component> components_;
  std::map<BeamId, int> lengths_;
  std::string reason_;  // empty while possible
};

/// Backend for square-cross-section beams joined end-to-end at right angles.
/// All pose arithmetic is exact; a cycle join must reproduce the existing
/// pose exactly and occupied cells must not overlap within a component, else
/// the state is impossible (carried, not thrown).
class BeamBackend : public Backend {
 public:
  explicit BeamBackend(std::map<BeamId, int> lengths);

  std::string name() const override { return "beam"; }
  void validate_graph(const CompositeGraph& graph) const override;
  StatePtr atomic_state(const CompositeGraph& graph, NodeId node) const override;
  StatePtr join_states(const StatePtr& left, const StatePtr& right, const JoinBundle& bundle,
                       const CompositeGraph& graph) const override;
  StatePtr disjoint_union(const StatePtr& left, const StatePtr& right) const override;
  StatePtr empty_state() const override;
  bool states_equal(const StatePtr& a, const StatePtr& b) const override;
  std::string describe(const StatePtr& state) const override;
  std::string state_json(const StatePtr& state) const override;

  /// 1 iff every component of the state is realizable.
  static int possible(const BeamState& state);

  /// Join name for a spec ("jht0" = head of A to tail of B, twist 0).
  static std::string join_name(const BeamJoinSpec& spec);
  static std::optional<BeamJoinSpec> parse_join_name(const std::string& name);

  /// Pose of beam B relative to beam A implied by one join: B's joined end
  /// cell sits one step beyond A's joined end cell, B's body leaving in the
  /// twist-selected perpendicular direction.
  static Pose relative_pose(const BeamJoinSpec& spec, int length_a, int length_b);

 private:
  std::map<BeamId, int> lengths_;
};

/// The standard beam vocabulary: 16 forward join types jht0..jtt3 with their
/// reverses (suffix r), one Beam object type with an out and an in port per
/// forward join, and the given per-id lengths.
Registry make_beam_registry(const std::map<BeamId, int>& lengths);

}  // namespace compose
