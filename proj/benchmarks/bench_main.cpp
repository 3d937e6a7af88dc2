#include <benchmark/benchmark.h>

#include <random>

#include "compose/circuit_backend.hpp"
#include "compose/notation.hpp"
#include "compose/rewrite.hpp"
#include "compose/tile_backend.hpp"

namespace {

using namespace compose;

std::shared_ptr<const Registry> circuit_registry() {
  auto reg = std::make_shared<Registry>();
  reg->add_join_type("0", "0", true);
  reg->add_join_type("a", "ar", false);
  reg->add_join_type("b", "br", false);
  reg->add_join_type("c", "cr", false);
  reg->add_object_type("A", false,
                       {Port{"pa", "a", PortDir::Out}, Port{"pb", "b", PortDir::Out}});
  reg->add_object_type("B", false,
                       {Port{"pa", "a", PortDir::In}, Port{"pc", "c", PortDir::Out}});
  reg->add_object_type("C", false,
                       {Port{"pb", "b", PortDir::In}, Port{"pc", "c", PortDir::In}});
  reg->dims = {{"a", 4}, {"b", 4}, {"c", 4}};
  reg->validate();
  return reg;
}

std::shared_ptr<const Registry> tile_registry() {
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

// A row of n tiles joined by x, with every second pair also joined by y
// through neighbors; enough structure to make canonicalization work.
CompositeGraph tile_row(const std::shared_ptr<const Registry>& reg, int n) {
  GraphBuilder b(reg);
  std::vector<NodeId> ids;
  for (int i = 0; i < n; ++i) ids.push_back(b.add_node("T", i + 1));
  for (int i = 0; i + 1 < n; ++i)
    b.add_edge(i + 1, "x", {ids[static_cast<size_t>(i)], "right"},
               {ids[static_cast<size_t>(i + 1)], "left"}, false);
  return std::move(b).build();
}

void BM_canonicalize(benchmark::State& state) {
  auto reg = tile_registry();
  auto g = tile_row(reg, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(canonicalize(g));
}
BENCHMARK(BM_canonicalize)->Arg(4)->Arg(6)->Arg(8);

void BM_parse_print_roundtrip(benchmark::State& state) {
  auto reg = circuit_registry();
  auto g = parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg);
  std::string text = print_tensorial(g);
  for (auto _ : state) benchmark::DoNotOptimize(parse_tensorial(text, reg));
}
BENCHMARK(BM_parse_print_roundtrip);

void BM_circuit_triangle(benchmark::State& state) {
  auto reg = circuit_registry();
  TensorTable t;
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (const char* name : {"A", "B", "C"}) {
    TensorTable::Entry e;
    e.shape = {4, 4};
    for (int i = 0; i < 16; ++i) e.data.push_back(value(rng));
    t.tensors[name] = e;
  }
  CircuitBackend backend(reg->dims, t);
  auto g = parse_tensorial("A^{a1 b2} B_{a1}^{c3} C_{b2 c3}", reg);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(g, backend));
}
BENCHMARK(BM_circuit_triangle);

void BM_enumerate_orders(benchmark::State& state) {
  auto reg = tile_registry();
  auto g = tile_row(reg, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_orders(g, 8));
}
BENCHMARK(BM_enumerate_orders)->Arg(4)->Arg(6);

void BM_tile_eval_all_orders(benchmark::State& state) {
  auto reg = tile_registry();
  auto g = tile_row(reg, 5);
  TileBackend backend;
  auto orders = enumerate_orders(g, 8);
  for (auto _ : state) {
    for (const auto& tree : orders) benchmark::DoNotOptimize(evaluate(g, backend, &tree));
  }
}
BENCHMARK(BM_tile_eval_all_orders);

}  // namespace

BENCHMARK_MAIN();
