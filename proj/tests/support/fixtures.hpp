#pragma once

#include <memory>

#include "compose/registry.hpp"

namespace fixtures {

// Triangle circuit vocabulary: A^{a b}, B_{a}^{c}, C_{b c}, dims 2.
inline std::shared_ptr<const compose::Registry> circuit_registry() {
  using namespace compose;
  auto reg = std::make_shared<Registry>();
  reg->add_join_type("0", "0", true);
  reg->add_join_type("a", "ar", false);
  reg->add_join_type("b", "br", false);
  reg->add_join_type("c", "cr", false);
  reg->add_join_type("d", "dr", false);
  reg->add_object_type("A", false,
                       {Port{"pa", "a", PortDir::Out}, Port{"pb", "b", PortDir::Out}});
  reg->add_object_type("B", false,
                       {Port{"pa", "a", PortDir::In}, Port{"pc", "c", PortDir::Out}});
  reg->add_object_type("C", false,
                       {Port{"pb", "b", PortDir::In}, Port{"pc", "c", PortDir::In}});
  reg->dims = {{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}};
  reg->validate();
  return reg;
}

// The boundary-notation example: open joins b at A and d at C.
inline std::shared_ptr<const compose::Registry> open_join_registry() {
  using namespace compose;
  auto reg = std::make_shared<Registry>();
  reg->add_join_type("0", "0", true);
  reg->add_join_type("a", "ar", false);
  reg->add_join_type("b", "br", false);
  reg->add_join_type("c", "cr", false);
  reg->add_join_type("d", "dr", false);
  reg->add_object_type("A", false,
                       {Port{"pa", "a", PortDir::Out}, Port{"pb", "b", PortDir::Out}});
  reg->add_object_type("B", false,
                       {Port{"pa", "a", PortDir::In}, Port{"pc", "c", PortDir::Out}});
  reg->add_object_type("C", false,
                       {Port{"pc", "c", PortDir::In}, Port{"pd", "d", PortDir::In}});
  reg->validate();
  return reg;
}

// Unit tile vocabulary: T[n] with ports right/left (x) and top/bottom (y).
inline std::shared_ptr<const compose::Registry> tile_registry() {
  using namespace compose;
  auto reg = std::make_shared<Registry>();
  reg->add_join_type("0", "0", true);
  reg->add_join_type("x", "xr", false);
  reg->add_join_type("y", "yr", false);
  reg->add_object_type("T", true,
                       {Port{"right", "x", PortDir::Out}, Port{"left", "x", PortDir::In},
                        Port{"top", "y", PortDir::Out}, Port{"bottom", "y", PortDir::In}});
  reg->validate();
  return reg;
}

// Unit squares with joins a (adjacent) and b (one-unit gap); the pruning
// family. Square S has both horizontal ports for both joins.
inline std::shared_ptr<const compose::Registry> squares_registry() {
  using namespace compose;
  auto reg = std::make_shared<Registry>();
  reg->add_join_type("0", "0", true);
  reg->add_join_type("a", "ar", false);
  reg->add_join_type("b", "br", false);
  reg->add_object_type("A", false,
                       {Port{"ra", "a", PortDir::Out}, Port{"rb", "b", PortDir::Out}});
  reg->add_object_type("B", false,
                       {Port{"la", "a", PortDir::In}, Port{"ra", "a", PortDir::Out}});
  reg->add_object_type("C", false,
                       {Port{"la", "a", PortDir::In}, Port{"lb", "b", PortDir::In}});
  reg->validate();
  return reg;
}

// Table vocabulary: legs L join a table top T at two positions.
inline std::shared_ptr<const compose::Registry> table_registry() {
  using namespace compose;
  auto reg = std::make_shared<Registry>();
  reg->add_join_type("0", "0", true);
  reg->add_join_type("a", "ar", false);
  reg->add_object_type("L", false, {Port{"top", "a", PortDir::Out}});
  reg->add_object_type("T", false,
                       {Port{"s1", "a", PortDir::In}, Port{"s2", "a", PortDir::In}});
  reg->validate();
  return reg;
}

inline const char* object_d_term() {
  return "T[1]^{x2}_{y1} T[2]^{y1 x3} T[3]_{x3}^{y4} T[4]_{y4 x2}^{y5} T[5]_{y5} "
         "T[6]^{x6} T[7]_{x6}";
}

}  // namespace fixtures
