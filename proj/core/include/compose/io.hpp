#pragma once

#include <memory>
#include <string>
#include <vector>

#include "compose/circuit_backend.hpp"
#include "compose/registry.hpp"
#include "compose/rewrite.hpp"

namespace compose {

// Registry file schema (JSON):
//   { "joins":   [{"name": str, "reverse": str, "null": bool}, ...],
//     "objects": [{"name": str, "params": 0|1,
//                  "ports": [{"id": str, "join": str, "dir": "out"|"in"}, ...]}, ...],
//     "dims":        {join: int, ...},        (optional, circuit backend)
//     "beamLengths": {id: int, ...} }         (optional, beam backend)

Registry parse_registry_json(const std::string& json_text);
std::shared_ptr<const Registry> load_registry(const std::string& path);
std::string registry_to_json(const Registry& registry);

// Tensor table schema: {"dims": {join: int}, "tensors": {type: {"shape": [...], "data": [...]}}}
// "dims" entries merge with the registry's; conflicting values are an error.

struct TensorTableFile {
  std::map<std::string, int> dims;
  TensorTable table;
};

TensorTableFile parse_tensor_table_json(const std::string& json_text);
TensorTableFile load_tensor_table(const std::string& path);

// Implication rules schema: [{"when": [t1, t2], "then": t}, ...]

std::vector<ImplicationRule> parse_rules_json(const std::string& json_text);
std::vector<ImplicationRule> load_rules(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace compose
