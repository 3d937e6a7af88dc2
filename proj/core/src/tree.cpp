#include "compose/tree.hpp"

namespace compose {

BipartiteTree BipartiteTree::leaf(NodeId id, std::string type,
                                  std::optional<std::int64_t> param) {
  BipartiteTree t;
  t.impl_ = LeafData{id, std::move(type), param};
  return t;
}

BipartiteTree BipartiteTree::node(BipartiteTree left, BipartiteTree right, JoinBundle bundle) {
  BipartiteTree t;
  t.impl_ = NodeData_{std::make_shared<BipartiteTree>(std::move(left)),
                      std::make_shared<BipartiteTree>(std::move(right)), std::move(bundle)};
  return t;
}

std::vector<NodeId> BipartiteTree::leaf_ids() const {
  std::vector<NodeId> out;
  if (is_leaf()) {
    out.push_back(leaf_data().id);
    return out;
  }
  auto l = left().leaf_ids();
  auto r = right().leaf_ids();
  out.insert(out.end(), l.begin(), l.end());
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

int BipartiteTree::leaf_count() const {
  if (is_leaf()) return 1;
  return left().leaf_count() + right().leaf_count();
}

}  // namespace compose
