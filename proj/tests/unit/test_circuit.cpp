#include <doctest.h>

#include <random>

#include "compose/circuit_backend.hpp"
#include "compose/notation.hpp"
#include "compose/rewrite.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_graphs.hpp"

using namespace compose;

namespace {

// Small vocabulary for vector/matrix cases: V has one out port, W one in,
// M one of each, U none.
std::shared_ptr<const Registry> vec_registry() {
  auto reg = std::make_shared<Registry>();
  reg->add_join_type("0", "0", true);
  reg->add_join_type("a", "ar", false);
  reg->add_object_type("V", false, {Port{"p", "a", PortDir::Out}});
  reg->add_object_type("W", false, {Port{"p", "a", PortDir::In}});
  reg->add_object_type("M", false,
                       {Port{"i", "a", PortDir::In}, Port{"o", "a", PortDir::Out}});
  reg->add_object_type("U", false, {});
  reg->validate();
  return reg;
}

TensorTable vec_table() {
  TensorTable t;
  t.tensors["V"] = {{2}, {1, 2}};
  t.tensors["W"] = {{2}, {3, 4}};
  t.tensors["M"] = {{2, 2}, {1, 0, 0, 1}};  // identity
  t.tensors["U"] = {{}, {1.0}};
  return t;
}

TensorTable random_int_table(std::mt19937& rng, const Registry& reg, int lo = -3,
                             int hi = 3) {
  TensorTable t;
  std::uniform_int_distribution<int> value(lo, hi);
  for (const auto& [name, ot] : reg.object_types()) {
    TensorTable::Entry e;
    size_t total = 1;
    for (const Port& p : ot.ports) {
      int d = reg.dims.at(p.accepts);
      e.shape.push_back(d);
      total *= static_cast<size_t>(d);
    }
    for (size_t i = 0; i < total; ++i) e.data.push_back(value(rng));
    t.tensors[name] = std::move(e);
  }
  return t;
}

TensorTable random_float_table(std::mt19937& rng, const Registry& reg) {
  TensorTable t;
  std::uniform_real_distribution<double> value(0.1, 1.0);
  for (const auto& [name, ot] : reg.object_types()) {
    TensorTable::Entry e;
    size_t total = 1;
    for (const Port& p : ot.ports) {
      e.shape.push_back(reg.dims.at(p.accepts));
      total *= static_cast<size_t>(reg.dims.at(p.accepts));
    }
    for (size_t k = 0; k < total; ++k) e.data.push_back(value(rng));
    t.tensors[name] = std::move(e);
  }
  return t;
}

const CircuitState& circuit(const StatePtr& s) {
  return dynamic_cast<const CircuitState&>(*s);
}

}  // namespace

TEST_CASE("atomic states transcribe tensors over the ports") {
  auto reg = vec_registry();
  CircuitBackend backend({{"a", 2}}, vec_table());
  GraphBuilder b(reg);
  b.add_node("V");
  auto g = std::move(b).build();
  auto s = backend.atomic_state(g, 0);
  REQUIRE(circuit(s).indices().size() == 1);
  CHECK(circuit(s).indices()[0].join == "a");
  CHECK(circuit(s).data() == std::vector<double>{1, 2});

  SUBCASE("wrong data length is rejected") {
    TensorTable bad = vec_table();
    bad.tensors["V"] = {{2}, {1, 2, 3}};
    CircuitBackend wrong({{"a", 2}}, bad);
    CHECK_THROWS_AS(wrong.atomic_state(g, 0), Error);
  }
  SUBCASE("missing entries are rejected") {
    CircuitBackend empty({{"a", 2}}, TensorTable{});
    CHECK_THROWS_AS(empty.atomic_state(g, 0), Error);
  }
}

TEST_CASE("joining vectors contracts to a scalar") {
  auto reg = vec_registry();
  CircuitBackend backend({{"a", 2}}, vec_table());
  auto g = parse_tensorial("V^{a1} W_{a1}", reg);
  auto s = evaluate(g, backend);
  CHECK(circuit(s).scalar() == doctest::Approx(11.0));  // 1*3 + 2*4
}

TEST_CASE("the identity matrix acts as identity") {
  auto reg = vec_registry();
  CircuitBackend backend({{"a", 2}}, vec_table());
  auto g = parse_tensorial("V^{a1} M_{a1}", reg);
  auto s = evaluate(g, backend);
  REQUIRE(circuit(s).indices().size() == 1);
  CHECK(circuit(s).data() == std::vector<double>{1, 2});
}

TEST_CASE("triangle contraction matches the hand-computed fixture") {
  auto reg = fixtures::circuit_registry();
  TensorTable t;
  t.tensors["A"] = {{2, 2}, {1, 2, 3, 4}};
  t.tensors["B"] = {{2, 2}, {5, 6, 7, 8}};
  t.tensors["C"] = {{2, 2}, {9, 10, 11, 12}};
  CircuitBackend backend(reg->dims, t);
  auto g = parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg);
  auto s = evaluate(g, backend);
  CHECK(circuit(s).scalar() == doctest::Approx(1480.0));

  auto oracle = oracles::brute_force_circuit(g, reg->dims, t);
  CHECK(oracle.values.at({}) == doctest::Approx(1480.0));
}

TEST_CASE("evaluation matches brute-force enumeration on random graphs") {
  auto reg = fixtures::circuit_registry();
  std::mt19937 rng(101);
  for (int i = 0; i < 50; ++i) {
    std::uniform_int_distribution<int> size(1, 5);
    auto g = testgen::random_graph(rng, reg, {"A", "B", "C"}, size(rng));
    auto table = random_int_table(rng, *reg);
    CircuitBackend backend(reg->dims, table);
    auto state = evaluate(g, backend);
    auto oracle = oracles::brute_force_circuit(g, reg->dims, table);
    CHECK(oracles::matches_oracle(circuit(state), oracle, 0.0));  // integers: exact
  }
}

TEST_CASE("contraction is independent of the composition order") {
  auto reg = fixtures::circuit_registry();
  std::mt19937 rng(131);

  SUBCASE("exactly for integer tensors") {
    for (int i = 0; i < 10; ++i) {
      std::uniform_int_distribution<int> size(2, 5);
      auto g = testgen::random_graph(rng, reg, {"A", "B", "C"}, size(rng));
      CircuitBackend backend(reg->dims, random_int_table(rng, *reg));
      auto reference = evaluate(g, backend);
      for (const auto& tree : enumerate_orders(g)) {
        auto s = evaluate(g, backend, &tree);
        CHECK(backend.states_equal(reference, s));
      }
    }
  }
  SUBCASE("within 1e-9 relative for float tensors") {
    for (int i = 0; i < 10; ++i) {
      std::uniform_int_distribution<int> size(2, 5);
      auto g = testgen::random_graph(rng, reg, {"A", "B", "C"}, size(rng));
      CircuitBackend backend(reg->dims, random_float_table(rng, *reg), 1e-9);
      auto reference = evaluate(g, backend);
      for (const auto& tree : enumerate_orders(g)) {
        auto s = evaluate(g, backend, &tree);
        CHECK(backend.states_equal(reference, s));
      }
    }
  }
}

TEST_CASE("disjoint parts factorize") {
  auto reg = vec_registry();
  CircuitBackend backend({{"a", 2}}, vec_table());

  SUBCASE("scalar times scalar") {
    auto g1 = parse_tensorial("V^{a1} W_{a1}", reg);
    auto u = CompositeGraph::disjoint_union(g1, g1);
    auto s = evaluate(u, backend);
    CHECK(circuit(s).scalar() == doctest::Approx(121.0));
  }
  SUBCASE("vector outer product") {
    auto g = parse_tensorial("V V", reg);
    auto s = evaluate(g, backend);
    REQUIRE(circuit(s).indices().size() == 2);
    CHECK(circuit(s).data() == std::vector<double>{1, 2, 2, 4});
  }
  SUBCASE("unit scalar is neutral") {
    auto g = parse_tensorial("V U", reg);
    auto s = evaluate(g, backend);
    REQUIRE(circuit(s).indices().size() == 1);
    CHECK(circuit(s).data() == std::vector<double>{1, 2});
  }
}

TEST_CASE("scaling one atomic tensor scales a closed scalar linearly") {
  auto reg = fixtures::circuit_registry();
  std::mt19937 rng(17);
  auto table = random_int_table(rng, *reg, 1, 4);
  auto g = parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg);

  CircuitBackend backend(reg->dims, table);
  double base = circuit(evaluate(g, backend)).scalar();

  TensorTable scaled = table;
  for (double& v : scaled.tensors["B"].data) v *= 3.0;
  CircuitBackend backend3(reg->dims, scaled);
  CHECK(circuit(evaluate(g, backend3)).scalar() == doctest::Approx(3.0 * base));
}

TEST_CASE("dimension mismatches are backend errors") {
  auto reg = vec_registry();
  auto g = parse_tensorial("V^{a1} W_{a1}", reg);
  CircuitBackend bad({{"a", 3}}, vec_table());
  CHECK_THROWS_AS(evaluate(g, bad), Error);
  try {
    evaluate(g, bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Backend);
  }
}

TEST_CASE("state equality matches indices by port, not by position") {
  auto reg = vec_registry();
  CircuitBackend backend({{"a", 2}}, vec_table());
  auto g = parse_tensorial("V V", reg);
  auto orders = enumerate_orders(g);
  REQUIRE(orders.size() == 1);
  auto s1 = evaluate(g, backend);
  auto s2 = evaluate(g, backend, &orders[0]);
  CHECK(backend.states_equal(s1, s2));
}
