#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compose/error.hpp"

namespace compose {

enum class PortDir { Out, In };

inline PortDir flipped(PortDir d) { return d == PortDir::Out ? PortDir::In : PortDir::Out; }

/// A join type. Join types come in mutually-reverse pairs (a, a^R); the pair
/// member listed first in the registry is the canonical spelling and is the
/// one stored on graph edges. The null join is its own reverse and carries
/// neither ports nor edges.
struct JoinType {
  std::string name;
  std::string reverse_of;
  bool is_null = false;
  bool canonical = true;  // true for the forward member of the pair
};

/// A join position on an object type. `accepts` names any registered join;
/// it is normalized to the canonical pair member on registration.
struct Port {
  std::string id;
  std::string accepts;
  PortDir direction = PortDir::Out;
};

struct ObjectType {
  std::string name;
  bool has_param = false;  // instances carry an integer parameter (tile label, beam id)
  std::vector<Port> ports;

  const Port* find_port(const std::string& id) const;
};

/// The vocabulary of a composition domain: join types with their reverse
/// pairing plus object types with typed ports. Built once during a load
/// phase, then treated as immutable; evaluation never mutates it.
class Registry {
 public:
  /// Registers the pair (name, reverse_name). For the null join the two names
  /// must coincide. Re-declaring an existing pair consistently is a no-op.
  void add_join_type(const std::string& name, const std::string& reverse_name, bool is_null);

  void add_object_type(const std::string& name, bool has_param, std::vector<Port> ports);

  /// Final consistency check: exactly one null join declared.
  void validate() const;

  bool has_join(const std::string& name) const { return joins_.count(name) != 0; }
  const JoinType& join(const std::string& name) const;
  const std::string& reverse_of(const std::string& name) const { return join(name).reverse_of; }

  /// Canonical pair member for any registered join name.
  const std::string& canonical_join(const std::string& name) const;
  bool is_self_reverse(const std::string& name) const;
  bool is_null_join(const std::string& name) const { return join(name).is_null; }
  const std::string& null_join_name() const;

  bool has_object_type(const std::string& name) const { return objects_.count(name) != 0; }
  const ObjectType& object_type(const std::string& name) const;

  const std::map<std::string, JoinType>& joins() const { return joins_; }
  const std::map<std::string, ObjectType>& object_types() const { return objects_; }

  /// Splits an index token like "x21" into the longest registered join name
  /// prefix plus a nonempty integer label suffix. Registration rejects name
  /// sets that would make this split ambiguous.
  std::optional<std::pair<std::string, int>> split_join_label(const std::string& token) const;

  // Backend configuration carried by the registry file.
  std::map<std::string, int> dims;                 // circuit: join type -> index dimension
  std::map<std::int64_t, int> beam_lengths;        // beam: beam id -> length in cells

  bool operator==(const Registry& other) const;

 private:
  std::map<std::string, JoinType> joins_;
  std::map<std::string, ObjectType> objects_;
};

}  // namespace compose
