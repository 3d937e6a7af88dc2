#include <doctest.h>

#include <random>

#include "compose/notation.hpp"
#include "compose/rewrite.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_graphs.hpp"

using namespace compose;

TEST_CASE("parse builds one node per factor and one edge per label pair") {
  auto g = parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", fixtures::circuit_registry());
  REQUIRE(g.node_count() == 3);
  REQUIRE(g.edges().size() == 3);
  CHECK(g.node(0).type == "A");
  CHECK(g.node(1).type == "B");
  CHECK(g.node(2).type == "C");
  const Edge* a = g.find_edge(1);
  REQUIRE(a);
  CHECK(a->join == "a");
  CHECK(a->from == Endpoint{0, "pa"});
  CHECK(a->to == Endpoint{1, "pa"});
}

TEST_CASE("repeated object types bind position by declared order") {
  auto g = parse_tensorial("L^{a1} L^{a2} T_{a1 a2}", fixtures::table_registry());
  REQUIRE(g.node_count() == 3);
  REQUIRE(g.edges().size() == 2);
  CHECK(g.find_edge(1)->to == Endpoint{2, "s1"});
  CHECK(g.find_edge(2)->to == Endpoint{2, "s2"});
}

TEST_CASE("pairing rule rejections") {
  auto reg = fixtures::circuit_registry();
  CHECK_THROWS_AS(parse_tensorial("A^{a1} B^{a1@pc}", reg), Error);  // two superscripts
  CHECK_THROWS_AS(parse_tensorial("A^{a1}", reg), Error);            // label used once
  CHECK_THROWS_AS(parse_tensorial("A^{a1} B_{a1} C_{a1@pc}", reg), Error);  // three times
  CHECK_THROWS_AS(parse_tensorial("A^{a1} B_{~a1}", reg), Error);  // mismatched reversal
  CHECK_THROWS_AS(parse_tensorial("A^{q1} B_{q1}", reg), Error);   // unknown join
  CHECK_THROWS_AS(parse_tensorial("A^{a1} Z_{a1}", reg), Error);   // unknown object
  CHECK_THROWS_AS(parse_tensorial("A^{c1} B_{c1@pc}", reg), Error);  // no matching port
}

TEST_CASE("explicit port overrides") {
  // Both table slots accept a-in; pick the second explicitly.
  auto g = parse_tensorial("L^{a1} T_{a1@s2}", fixtures::table_registry());
  CHECK(g.find_edge(1)->to == Endpoint{1, "s2"});
  CHECK_THROWS_AS(parse_tensorial("L^{a1} T_{a1@s9}", fixtures::table_registry()), Error);
  CHECK_THROWS_AS(parse_tensorial("L^{a1@s1} T_{a1}", fixtures::table_registry()), Error);
}

TEST_CASE("reversal spelling parses to the same graph") {
  Registry reg;
  reg.add_join_type("0", "0", true);
  reg.add_join_type("a", "ar", false);
  reg.add_join_type("b", "br", false);
  reg.add_object_type("A", false,
                      {Port{"pa", "a", PortDir::Out}, Port{"pb", "b", PortDir::Out}});
  reg.add_object_type("C", false,
                      {Port{"pa", "a", PortDir::In}, Port{"pa2", "a", PortDir::Out}});
  reg.add_object_type("B", false,
                      {Port{"pb", "b", PortDir::In}, Port{"pa", "a", PortDir::In}});
  reg.validate();
  auto shared = std::make_shared<Registry>(reg);
  auto g1 = parse_tensorial("A^{a1 b2} C_{a1}^{a3} B_{b2 a3}", shared);
  auto g2 = parse_tensorial("A^{b2}_{~a1} C^{~a1 a3} B_{b2 a3}", shared);
  CHECK(alpha_equivalent(g1, g2));
  CHECK(identical(canonicalize(g1), canonicalize(g2)));
}

TEST_CASE("parsing is permutation and relabeling stable") {
  auto reg = fixtures::circuit_registry();
  auto g1 = parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg);
  auto g2 = parse_tensorial("C_{b7 c9} A^{a4 b7} B_{a4}^{c9}", reg);
  CHECK(alpha_equivalent(g1, g2));
}

TEST_CASE("print emits canonical text that parses back") {
  auto reg = fixtures::circuit_registry();
  auto g = parse_tensorial("C_{b7 c9} A^{a4 b7} B_{a4}^{c9}", reg);
  std::string text = print_tensorial(g);
  CHECK(alpha_equivalent(parse_tensorial(text, reg), g));
  // Fixed point: printing the canonical form reproduces the text.
  CHECK(print_tensorial(canonicalize(g)) == text);
}

TEST_CASE("print of a single node and of a disjoint pair") {
  auto reg = fixtures::circuit_registry();
  GraphBuilder b1(reg);
  b1.add_node("A");
  CHECK(print_tensorial(std::move(b1).build()) == "A");

  GraphBuilder b2(reg);
  b2.add_node("A");
  b2.add_node("B");
  CHECK(print_tensorial(std::move(b2).build()) == "A B");
}

TEST_CASE("print keeps reversed descriptions") {
  auto reg = fixtures::circuit_registry();
  auto g = parse_tensorial("A_{~a1} B^{~a1}", reg);
  std::string text = print_tensorial(g);
  CHECK(text.find('~') != std::string::npos);
  CHECK(alpha_equivalent(parse_tensorial(text, reg), g));
}

TEST_CASE("round trip holds on random graphs") {
  auto reg = fixtures::circuit_registry();
  std::mt19937 rng(7);
  for (int i = 0; i < 60; ++i) {
    std::uniform_int_distribution<int> size(1, 6);
    auto g = testgen::random_graph(rng, reg, {"A", "B", "C"}, size(rng));
    auto back = parse_tensorial(print_tensorial(g), reg);
    CHECK(alpha_equivalent(back, g));
    CHECK(oracles::isomorphic(back, g));
  }
}

TEST_CASE("round trip distinguishes port bindings on same-class ports") {
  // Two a-in slots on T; an edge on s2 only must not rebind to s1.
  auto reg = fixtures::table_registry();
  GraphBuilder b(reg);
  NodeId l = b.add_node("L");
  NodeId t = b.add_node("T");
  b.add_edge(1, "a", {l, "top"}, {t, "s2"}, false);
  auto g = std::move(b).build();
  std::string text = print_tensorial(g);
  CHECK(text.find("@s2") != std::string::npos);
  auto back = parse_tensorial(text, reg);
  CHECK(back.find_edge(1)->to.port == "s2");
}

TEST_CASE("bipartite notation parses into order-carrying trees") {
  auto reg = fixtures::table_registry();
  SUBCASE("single join") {
    auto t = parse_bipartite("(L, T)@{a: L.top -> T.s1}", reg);
    REQUIRE(!t.is_leaf());
    CHECK(t.left().is_leaf());
    CHECK(t.right().is_leaf());
    REQUIRE(t.bundle().joins.size() == 1);
    CHECK(t.bundle().joins[0].join == "a");
    CHECK(t.bundle().joins[0].left_is_out);
    auto g = flatten(t, reg);
    CHECK(g.edges().size() == 1);
  }
  SUBCASE("null join") {
    auto t = parse_bipartite("(L, T)@0", reg);
    CHECK(t.bundle().is_null());
    auto g = flatten(t, reg);
    CHECK(g.node_count() == 2);
    CHECK(g.edges().empty());
    CHECK(g.components().size() == 2);
  }
  SUBCASE("nested pair with compound bundle") {
    auto reg2 = fixtures::circuit_registry();
    auto t = parse_bipartite(
        "((A, B)@{a: A.pa -> B.pa}, C)@{b: A.pb -> C.pb; c: B.pc -> C.pc}", reg2);
    REQUIRE(!t.is_leaf());
    CHECK(t.bundle().joins.size() == 2);
    auto g = flatten(t, reg2);
    CHECK(alpha_equivalent(
        g, parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg2)));
  }
  SUBCASE("reverse-described binding") {
    auto t = parse_bipartite("((L, T)@{a: L.top -> T.s1}, L)@{~a: T.s2 -> L.top}", reg);
    REQUIRE(t.bundle().joins.size() == 1);
    CHECK_FALSE(t.bundle().joins[0].left_is_out);
    auto g = flatten(t, reg);
    CHECK(alpha_equivalent(g, parse_tensorial("L^{a1} L^{a2} T_{a1 a2}", reg)));
  }
  SUBCASE("positional disambiguation with #k") {
    auto t = parse_bipartite("((L, L)@0, T)@{a: L#1.top -> T.s1; a: L#2.top -> T.s2}", reg);
    auto g = flatten(t, reg);
    CHECK(alpha_equivalent(g, parse_tensorial("L^{a1} L^{a2} T_{a1 a2}", reg)));
    CHECK_THROWS_AS(
        parse_bipartite("((L, L)@0, T)@{a: L.top -> T.s1}", reg),  // ambiguous L
        Error);
  }
  SUBCASE("term elements become left-nested subtrees") {
    auto reg2 = fixtures::circuit_registry();
    auto t = parse_bipartite("(A, B^{c3} C_{c3})@{a: A.pa -> B.pa; b: A.pb -> C.pb}", reg2);
    auto g = flatten(t, reg2);
    CHECK(alpha_equivalent(
        g, parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg2)));
  }
  SUBCASE("binding a non-free port fails") {
    CHECK_THROWS_AS(parse_bipartite(
                        "((L, T)@{a: L.top -> T.s1}, L)@{~a: T.s1 -> L.top}", reg),
                    Error);
  }
}

TEST_CASE("tile params travel through bipartite references") {
  auto reg = fixtures::tile_registry();
  auto t = parse_bipartite("(T[1], T[2])@{x: T[1].right -> T[2].left}", reg);
  auto g = flatten(t, reg);
  REQUIRE(g.node_count() == 2);
  CHECK(*g.node(0).param == 1);
  CHECK(g.edges()[0].join == "x");
}

TEST_CASE("parsers reject garbage with errors, never crashes") {
  auto reg = fixtures::circuit_registry();
  std::mt19937 rng(999);
  const std::string alphabet = "ABC abc123^_{}[]~@#(),.->;0";
  std::uniform_int_distribution<size_t> len(0, 40);
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  int parsed = 0;
  for (int i = 0; i < 800; ++i) {
    std::string text;
    for (size_t k = len(rng); k-- > 0;) text += alphabet[pick(rng)];
    try {
      parse_tensorial(text, reg);
      ++parsed;
    } catch (const Error&) {
    }
    try {
      parse_bipartite(text, reg);
    } catch (const Error&) {
    }
  }
  CHECK(parsed < 800);  // most of that soup is not a term
}

TEST_CASE("dot export transcribes the graph") {
  auto reg = fixtures::circuit_registry();
  SUBCASE("triangle") {
    auto g = parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg);
    std::string dot = to_dot(g);
    CHECK(dot.find("digraph") == 0);
    CHECK(dot.find("n0 -> n1 [label=\"a\"]") != std::string::npos);
    CHECK(dot.find("n0 -> n2 [label=\"b\"]") != std::string::npos);
    CHECK(dot.find("n1 -> n2 [label=\"c\"]") != std::string::npos);
    CHECK(dot.find("shape=point") == std::string::npos);  // closed graph
  }
  SUBCASE("open joins become point pseudo-nodes") {
    auto g = parse_tensorial("A^{a1} B_{a1}^{c3} C_{c3}", fixtures::open_join_registry());
    std::string dot = to_dot(g);
    int points = 0;
    for (size_t at = 0; (at = dot.find("shape=point", at)) != std::string::npos; ++at)
      ++points;
    CHECK(points == 2);  // b at A, d at C
  }
  SUBCASE("empty graph") {
    GraphBuilder b(reg);
    std::string dot = to_dot(std::move(b).build());
    CHECK(dot == "digraph composite {\n}\n");
  }
}
