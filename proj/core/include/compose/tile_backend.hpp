#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compose/backend.hpp"

namespace compose {

struct Vec2 {
  int x = 0;
  int y = 0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
  friend auto operator<=>(Vec2 a, Vec2 b) = default;
};

using TileLabel = std::int64_t;

/// Generalized state for labeled unit tiles: the set of pairwise integer
/// displacements, one per ordered pair of tiles within a connected part.
/// Invariants (maintained by every operation while consistent):
///   reflexive   ((n,n),(0,0)) for every tile n
///   antisymmetric ((m,n),d) implies ((n,m),-d)
///   functional  one displacement per ordered pair
///   no coincidence ((m,n),(0,0)) with m != n is inconsistent
///   additive    ((m,n),d1),((n,p),d2) imply ((m,p),d1+d2)
/// Inconsistency is carried, not thrown, so evaluation stays total and
/// order independent; the pair content of an inconsistent state is frozen at
/// the first conflict and not part of state equality.
class TileState : public GeneralizedState {
 public:
  static TileState single(TileLabel n);

  bool consistent() const { return reason_.empty(); }
  const std::string& inconsistency_reason() const { return reason_; }

  const std::map<std::pair<TileLabel, TileLabel>, Vec2>& pairs() const { return pairs_; }
  std::vector<TileLabel> tiles() const;
  bool has_tile(TileLabel n) const;

  std::optional<Vec2> displacement(TileLabel from, TileLabel to) const;

  /// Tiles of the connected part containing `member`.
  std::vector<TileLabel> component_of(TileLabel member) const;

  /// Inserts a pair plus its mirror, detecting conflicts, coincidences, and
  /// non-closing cycles. No-op once inconsistent.
  void insert_pair(TileLabel m, TileLabel n, Vec2 d);
  void mark_inconsistent(std::string reason);

  bool equals(const TileState& other) const;

 private:
  std::map<std::pair<TileLabel, TileLabel>, Vec2> pairs_;
  std::string reason_;  // empty while consistent
};

/// Fiducial compression: per connected part, displacements from one chosen
/// reference tile. Expansion by subtraction reproduces the full state.
struct FiducialState {
  struct Component {
    TileLabel fiducial = 0;
    std::map<TileLabel, Vec2> offsets;  // tile -> displacement from fiducial
  };
  std::vector<Component> components;
};

FiducialState compress(const TileState& state);
TileState expand(const FiducialState& fiducial);

/// Geometric queries over a consistent state.
std::optional<Vec2> tile_displacement(const TileState& state, TileLabel from, TileLabel to);
int component_width(const TileState& state, TileLabel member);
int component_height(const TileState& state, TileLabel member);
bool tiles_possible(const TileState& state);

/// Backend for labeled unit tiles: x joins offset (1,0), y joins (0,1),
/// reverses negated. Exact integer arithmetic throughout.
class TileBackend : public Backend {
 public:
  TileBackend();
  /// Custom join offsets (canonical join name -> displacement from the out
  /// tile to the in tile), e.g. a unit-gap family {a:(1,0), b:(2,0)}.
  explicit TileBackend(std::map<std::string, Vec2> offsets);

  std::string name() const override { return "tile"; }
  void validate_graph(const CompositeGraph& graph) const override;
  StatePtr atomic_state(const CompositeGraph& graph, NodeId node) const override;
  StatePtr join_states(const StatePtr& left, const StatePtr& right, const JoinBundle& bundle,
                       const CompositeGraph& graph) const override;
  StatePtr disjoint_union(const StatePtr& left, const StatePtr& right) const override;
  StatePtr empty_state() const override;
  bool states_equal(const StatePtr& a, const StatePtr& b) const override;
  std::string describe(const StatePtr& state) const override;
  std::string state_json(const StatePtr& state) const override;

 private:
  std::map<std::string, Vec2> offsets_;
};

}  // namespace compose
