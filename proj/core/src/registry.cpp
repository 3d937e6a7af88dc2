#include "compose/registry.hpp"

#include <algorithm>

namespace compose {

const Port* ObjectType::find_port(const std::string& id) const {
  for (const auto& p : ports) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

namespace {

// True when `name` is `base` followed by one or more digits. Such pairs would
// make index tokens like "x21" ambiguous, so registration rejects them.
bool digit_extension_of(const std::string& name, const std::string& base) {
  if (name.size() <= base.size() || name.compare(0, base.size(), base) != 0) return false;
  return std::all_of(name.begin() + static_cast<long>(base.size()), name.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

void Registry::add_join_type(const std::string& name, const std::string& reverse_name,
                             bool is_null) {
  if (name.empty() || reverse_name.empty())
    fail(ErrorKind::Registry, "join type names must be nonempty");
  if (is_null && name != reverse_name)
    fail(ErrorKind::Registry, "the null join must be its own reverse, got '" + name + "'/'" +
                                  reverse_name + "'");

  if (auto it = joins_.find(name); it != joins_.end()) {
    const JoinType& existing = it->second;
    if (existing.reverse_of == reverse_name && existing.is_null == is_null) return;  // re-declared
    fail(ErrorKind::Registry, "join type '" + name + "' already registered with reverse '" +
                                  existing.reverse_of + "'");
  }
  if (auto it = joins_.find(reverse_name); it != joins_.end() && it->second.reverse_of != name)
    fail(ErrorKind::Registry, "reverse pairing conflict: '" + reverse_name +
                                  "' is already the reverse of '" + it->second.reverse_of + "'");

  if (is_null) {
    for (const auto& [n, jt] : joins_)
      if (jt.is_null)
        fail(ErrorKind::Registry,
             "a null join ('" + n + "') is already registered; it must be unique");
  }

  for (const auto& [other, jt] : joins_) {
    (void)jt;
    if (digit_extension_of(name, other) || digit_extension_of(other, name))
      fail(ErrorKind::Registry, "join name '" + name + "' is ambiguous against '" + other +
                                    "' in index tokens");
    if (name != reverse_name &&
        (digit_extension_of(reverse_name, other) || digit_extension_of(other, reverse_name)))
      fail(ErrorKind::Registry, "join name '" + reverse_name + "' is ambiguous against '" +
                                    other + "' in index tokens");
  }

  joins_[name] = JoinType{name, reverse_name, is_null, true};
  if (reverse_name != name)
    joins_[reverse_name] = JoinType{reverse_name, name, is_null, false};
}

void Registry::add_object_type(const std::string& name, bool has_param, std::vector<Port> ports) {
  if (objects_.count(name))
    fail(ErrorKind::Registry, "object type '" + name + "' already registered");
  for (auto& port : ports) {
    if (!has_join(port.accepts))
      fail(ErrorKind::Registry, "object type '" + name + "' port '" + port.id +
                                    "' references undeclared join '" + port.accepts + "'");
    if (is_null_join(port.accepts))
      fail(ErrorKind::Registry,
           "the null join has no position; port '" + port.id + "' cannot accept it");
    // Normalize to the canonical pair member, flipping the direction when the
    // reverse spelling was used.
    const JoinType& jt = join(port.accepts);
    if (!jt.canonical) {
      port.accepts = jt.reverse_of;
      port.direction = flipped(port.direction);
    }
  }
  for (size_t i = 0; i < ports.size(); ++i)
    for (size_t j = i + 1; j < ports.size(); ++j)
      if (ports[i].id == ports[j].id)
        fail(ErrorKind::Registry,
             "duplicate port id '" + ports[i].id + "' on object type '" + name + "'");
  objects_[name] = ObjectType{name, has_param, std::move(ports)};
}

void Registry::validate() const {
  int nulls = 0;
  for (const auto& [n, jt] : joins_) {
    (void)n;
    if (jt.is_null) ++nulls;
  }
  if (nulls != 1)
    fail(ErrorKind::Registry,
         "a registry must declare exactly one null join, found " + std::to_string(nulls));
}

const JoinType& Registry::join(const std::string& name) const {
  auto it = joins_.find(name);
  if (it == joins_.end()) fail(ErrorKind::Registry, "unknown join type '" + name + "'");
  return it->second;
}

const std::string& Registry::canonical_join(const std::string& name) const {
  const JoinType& jt = join(name);
  return jt.canonical ? jt.name : jt.reverse_of;
}

bool Registry::is_self_reverse(const std::string& name) const {
  return join(name).reverse_of == name;
}

const std::string& Registry::null_join_name() const {
  for (const auto& [n, jt] : joins_)
    if (jt.is_null) return jt.name;
  fail(ErrorKind::Registry, "no null join registered");
}

const ObjectType& Registry::object_type(const std::string& name) const {
  auto it = objects_.find(name);
  if (it == objects_.end()) fail(ErrorKind::Registry, "unknown object type '" + name + "'");
  return it->second;
}

std::optional<std::pair<std::string, int>> Registry::split_join_label(
    const std::string& token) const {
  // Longest registered name whose remainder is a nonempty label.
  for (size_t cut = token.size(); cut > 0; --cut) {
    std::string head = token.substr(0, cut);
    std::string tail = token.substr(cut);
    if (tail.empty() || tail.size() > 9 || !joins_.count(head)) continue;
    if (!std::all_of(tail.begin(), tail.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; }))
      continue;
    return std::make_pair(head, std::stoi(tail));
  }
  return std::nullopt;
}

bool Registry::operator==(const Registry& other) const {
  auto join_eq = [](const JoinType& a, const JoinType& b) {
    return a.name == b.name && a.reverse_of == b.reverse_of && a.is_null == b.is_null;
  };
  auto port_eq = [](const Port& a, const Port& b) {
    return a.id == b.id && a.accepts == b.accepts && a.direction == b.direction;
  };
  if (joins_.size() != other.joins_.size() || objects_.size() != other.objects_.size())
    return false;
  for (const auto& [name, jt] : joins_) {
    auto it = other.joins_.find(name);
    if (it == other.joins_.end() || !join_eq(jt, it->second)) return false;
  }
  for (const auto& [name, ot] : objects_) {
    auto it = other.objects_.find(name);
    if (it == other.objects_.end() || ot.has_param != it->second.has_param ||
        ot.ports.size() != it->second.ports.size())
      return false;
    for (size_t i = 0; i < ot.ports.size(); ++i)
      if (!port_eq(ot.ports[i], it->second.ports[i])) return false;
  }
  return dims == other.dims && beam_lengths == other.beam_lengths;
}

}  // namespace compose
