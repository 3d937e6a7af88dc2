#include <doctest.h>

#include "compose/graph.hpp"
#include "compose/notation.hpp"
#include "support/fixtures.hpp"

using namespace compose;

namespace {

CompositeGraph triangle() {
  return parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", fixtures::circuit_registry());
}

}  // namespace

TEST_CASE("builder validates port bindings") {
  auto reg = fixtures::circuit_registry();

  SUBCASE("join type must match the port") {
    GraphBuilder b(reg);
    NodeId a = b.add_node("A");
    NodeId c = b.add_node("C");
    b.add_edge(1, "a", {a, "pa"}, {c, "pb"}, false);  // pb accepts b, not a
    CHECK_THROWS_AS(std::move(b).build(), Error);
  }
  SUBCASE("direction must match") {
    GraphBuilder b(reg);
    NodeId a1 = b.add_node("A");
    NodeId a2 = b.add_node("A");
    b.add_edge(1, "a", {a1, "pa"}, {a2, "pa"}, false);
    CHECK_THROWS_AS(std::move(b).build(), Error);
  }
  SUBCASE("a port binds at most once") {
    GraphBuilder b(reg);
    NodeId a = b.add_node("A");
    NodeId b1 = b.add_node("B");
    NodeId b2 = b.add_node("B");
    b.add_edge(1, "a", {a, "pa"}, {b1, "pa"}, false);
    b.add_edge(2, "a", {a, "pa"}, {b2, "pa"}, false);
    CHECK_THROWS_AS(std::move(b).build(), Error);
  }
  SUBCASE("edge labels are unique") {
    GraphBuilder b(reg);
    NodeId a = b.add_node("A");
    NodeId bb = b.add_node("B");
    NodeId c = b.add_node("C");
    b.add_edge(1, "a", {a, "pa"}, {bb, "pa"}, false);
    b.add_edge(1, "b", {a, "pb"}, {c, "pb"}, false);
    CHECK_THROWS_AS(std::move(b).build(), Error);
  }
  SUBCASE("self-joins are rejected") {
    auto tiles = fixtures::tile_registry();
    GraphBuilder b(tiles);
    NodeId t = b.add_node("T", 1);
    b.add_edge(1, "x", {t, "right"}, {t, "left"}, false);
    CHECK_THROWS_AS(std::move(b).build(), Error);
  }
  SUBCASE("params are required exactly when declared") {
    auto tiles = fixtures::tile_registry();
    GraphBuilder b1(tiles);
    CHECK_THROWS_AS(b1.add_node("T"), Error);
    GraphBuilder b2(reg);
    CHECK_THROWS_AS(b2.add_node("A", 3), Error);
  }
}

TEST_CASE("adding an edge spelled with the reverse name normalizes") {
  auto reg = fixtures::circuit_registry();
  GraphBuilder b(reg);
  NodeId a = b.add_node("A");
  NodeId bb = b.add_node("B");
  b.add_edge(1, "ar", {bb, "pa"}, {a, "pa"}, false);  // ar out at B == a in at B
  CompositeGraph g = std::move(b).build();
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edges()[0].join == "a");
  CHECK(g.edges()[0].from.node == a);
  CHECK(g.edges()[0].to.node == bb);
  CHECK(g.edges()[0].described_reversed);
}

TEST_CASE("components split at null joins") {
  SUBCASE("object D has two disjoint parts") {
    auto g = parse_tensorial(fixtures::object_d_term(), fixtures::tile_registry());
    auto comps = g.components();
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].node_count() == 5);
    CHECK(comps[1].node_count() == 2);
  }
  SUBCASE("a connected triangle is one component") {
    CHECK(triangle().components().size() == 1);
  }
  SUBCASE("the empty graph has none") {
    GraphBuilder b(fixtures::circuit_registry());
    CHECK(std::move(b).build().components().empty());
  }
}

TEST_CASE("components of a disjoint union are the union of components") {
  auto g1 = parse_tensorial("A^{a1} B_{a1}", fixtures::circuit_registry());
  auto g2 = triangle();
  auto u = CompositeGraph::disjoint_union(g1, g2);
  CHECK(u.components().size() == g1.components().size() + g2.components().size());
  // labels stay unique
  std::set<int> labels;
  for (const Edge& e : u.edges()) CHECK(labels.insert(e.label).second);
}

TEST_CASE("free ports read off the open joins") {
  SUBCASE("open joins b at A and d at C") {
    // A joined to B by a, B to C by c; A's b port and C's d port stay open.
    auto g = parse_tensorial("A^{a1} B_{a1}^{c3} C_{c3}", fixtures::open_join_registry());
    auto fps = g.free_ports();
    REQUIRE(fps.size() == 2);
    CHECK(fps[0].node == 0);
    CHECK(fps[0].join == "b");
    CHECK(fps[0].direction == PortDir::Out);
    CHECK(fps[1].node == 2);
    CHECK(fps[1].join == "d");
    CHECK(fps[1].direction == PortDir::In);  // reads as d-reversed outward
  }
  SUBCASE("fully joined triangle has an empty signature") {
    CHECK(triangle().free_ports().empty());
  }
  SUBCASE("a single tile has all four ports free, sorted by port id") {
    auto g = parse_tensorial("T[7]", fixtures::tile_registry());
    auto fps = g.free_ports();
    REQUIRE(fps.size() == 4);
    CHECK(fps[0].port == "bottom");
    CHECK(fps[1].port == "left");
    CHECK(fps[2].port == "right");
    CHECK(fps[3].port == "top");
  }
}

TEST_CASE("free port signature is invariant under label renaming") {
  auto reg = fixtures::circuit_registry();
  auto g1 = parse_tensorial("A^{a1} B_{a1}", reg);
  auto g2 = parse_tensorial("A^{a9} B_{a9}", reg);
  auto f1 = g1.free_ports();
  auto f2 = g2.free_ports();
  REQUIRE(f1.size() == f2.size());
  for (size_t i = 0; i < f1.size(); ++i) {
    CHECK(f1[i].node == f2[i].node);
    CHECK(f1[i].port == f2[i].port);
    CHECK(f1[i].join == f2[i].join);
    CHECK(f1[i].direction == f2[i].direction);
  }
  REQUIRE(f1.size() == 2);
  CHECK(f1[0].join == "b");  // A.pb out
  CHECK(f1[1].join == "c");  // B.pc out
}
