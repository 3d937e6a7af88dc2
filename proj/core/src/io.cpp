#include "compose/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace compose {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::Io, std::string("malformed JSON in ") + what);
  return j;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Registry parse_registry_json(const std::string& json_text) {
  json j = parse_json(json_text, "registry");
  Registry reg;

  if (!j.contains("joins") || !j["joins"].is_array())
    fail(ErrorKind::Io, "registry needs a top-level \"joins\" array");
  for (const json& entry : j["joins"]) {
    if (!entry.contains("name") || !entry.contains("reverse"))
      fail(ErrorKind::Io, "every join entry needs \"name\" and \"reverse\"");
    reg.add_join_type(entry["name"].get<std::string>(), entry["reverse"].get<std::string>(),
                      entry.value("null", false));
  }

  for (const json& entry : j.value("objects", json::array())) {
    if (!entry.contains("name"))
      fail(ErrorKind::Io, "every object entry needs a \"name\"");
    std::vector<Port> ports;
    for (const json& pj : entry.value("ports", json::array())) {
      if (!pj.contains("id") || !pj.contains("join") || !pj.contains("dir"))
        fail(ErrorKind::Io, "every port needs \"id\", \"join\", and \"dir\"");
      std::string dir = pj["dir"].get<std::string>();
      if (dir != "out" && dir != "in")
        fail(ErrorKind::Io, "port \"dir\" must be \"out\" or \"in\", got '" + dir + "'");
      ports.push_back(Port{pj["id"].get<std::string>(), pj["join"].get<std::string>(),
                           dir == "out" ? PortDir::Out : PortDir::In});
    }
    reg.add_object_type(entry["name"].get<std::string>(), entry.value("params", 0) != 0,
                        std::move(ports));
  }

  if (j.contains("dims")) {
    for (const auto& [join, dim] : j["dims"].items()) {
      if (!dim.is_number_integer() || dim.get<int>() < 1)
        fail(ErrorKind::Io, "dimension of '" + join + "' must be a positive integer");
      reg.dims[join] = dim.get<int>();
    }
  }
  if (j.contains("beamLengths")) {
    for (const auto& [id, length] : j["beamLengths"].items()) {
      if (!length.is_number_integer())
        fail(ErrorKind::Io, "beam length of '" + id + "' must be an integer");
      try {
        reg.beam_lengths[std::stoll(id)] = length.get<int>();
      } catch (const std::exception&) {
        fail(ErrorKind::Io, "beam id '" + id + "' is not an integer");
      }
    }
  }

  reg.validate();
  return reg;
}

std::shared_ptr<const Registry> load_registry(const std::string& path) {
  return std::make_shared<const Registry>(parse_registry_json(read_file(path)));
}

std::string registry_to_json(const Registry& registry) {
  json j;
  j["joins"] = json::array();
  for (const auto& [name, jt] : registry.joins()) {
    (void)name;
    if (!jt.canonical && !jt.is_null) continue;  // one entry per pair
    j["joins"].push_back({{"name", jt.name}, {"reverse", jt.reverse_of}, {"null", jt.is_null}});
  }
  j["objects"] = json::array();
  for (const auto& [name, ot] : registry.object_types()) {
    (void)name;
    json ports = json::array();
    for (const Port& p : ot.ports)
      ports.push_back({{"id", p.id},
                       {"join", p.accepts},
                       {"dir", p.direction == PortDir::Out ? "out" : "in"}});
    j["objects"].push_back(
        {{"name", ot.name}, {"params", ot.has_param ? 1 : 0}, {"ports", ports}});
  }
  if (!registry.dims.empty()) {
    json dims = json::object();
    for (const auto& [join, d] : registry.dims) dims[join] = d;
    j["dims"] = dims;
  }
  if (!registry.beam_lengths.empty()) {
    json lengths = json::object();
    for (const auto& [id, length] : registry.beam_lengths)
      lengths[std::to_string(id)] = length;
    j["beamLengths"] = lengths;
  }
  return j.dump(2);
}

TensorTableFile parse_tensor_table_json(const std::string& json_text) {
  json j = parse_json(json_text, "tensor table");
  TensorTableFile out;
  if (j.contains("dims")) {
    for (const auto& [join, dim] : j["dims"].items()) {
      if (!dim.is_number_integer() || dim.get<int>() < 1)
        fail(ErrorKind::Io, "dimension of '" + join + "' must be a positive integer");
      out.dims[join] = dim.get<int>();
    }
  }
  if (!j.contains("tensors") || !j["tensors"].is_object())
    fail(ErrorKind::Io, "tensor table needs a top-level \"tensors\" object");
  for (const auto& [type, entry] : j["tensors"].items()) {
    if (!entry.contains("shape") || !entry.contains("data"))
      fail(ErrorKind::Io, "tensor for '" + type + "' needs \"shape\" and \"data\"");
    TensorTable::Entry e;
    for (const json& d : entry["shape"]) e.shape.push_back(d.get<int>());
    for (const json& v : entry["data"]) e.data.push_back(v.get<double>());
    size_t expected = 1;
    for (int d : e.shape) expected *= static_cast<size_t>(d);
    if (e.data.size() != expected)
      fail(ErrorKind::Io, "tensor for '" + type + "' has " + std::to_string(e.data.size()) +
                              " entries, shape wants " + std::to_string(expected));
    out.table.tensors[type] = std::move(e);
  }
  return out;
}

TensorTableFile load_tensor_table(const std::string& path) {
  return parse_tensor_table_json(read_file(path));
}

std::vector<ImplicationRule> parse_rules_json(const std::string& json_text) {
  json j = parse_json(json_text, "implication rules");
  if (!j.is_array()) fail(ErrorKind::Io, "implication rules must be a JSON array");
  std::vector<ImplicationRule> out;
  for (const json& entry : j) {
    if (!entry.contains("when") || !entry.contains("then") || !entry["when"].is_array() ||
        entry["when"].size() != 2)
      fail(ErrorKind::Io, "each rule needs \"when\": [t1, t2] and \"then\": t");
    out.push_back(ImplicationRule{entry["when"][0].get<std::string>(),
                                  entry["when"][1].get<std::string>(),
                                  entry["then"].get<std::string>()});
  }
  return out;
}

std::vector<ImplicationRule> load_rules(const std::string& path) {
  return parse_rules_json(read_file(path));
}

}  // namespace compose
