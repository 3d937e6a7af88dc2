#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "compose/graph.hpp"

namespace compose {

/// One elementary join of a bipartite composition step, described across the
/// cut. `left`/`right` give the endpoints in the respective subtrees (node
/// ids refer to leaf ids). `left_is_out` tells which side carries the out
/// port of the canonical join type; when false the join reads left-to-right
/// as the reverse type.
struct BundleJoin {
  std::string join;  // canonical join type name
  Endpoint left;
  Endpoint right;
  bool left_is_out = true;

  Endpoint out_endpoint() const { return left_is_out ? left : right; }
  Endpoint in_endpoint() const { return left_is_out ? right : left; }
};

/// The alpha of one composition step (A,B)_alpha. An empty list is the null
/// join; a compound bundle is an unordered set of elementary joins.
struct JoinBundle {
  std::vector<BundleJoin> joins;

  bool is_null() const { return joins.empty(); }
};

/// Nested pairwise composition: the order-carrying description of a
/// composite. Leaves are object instances; each leaf has an id that becomes
/// (or mirrors) the node id of the flattened graph.
class BipartiteTree {
 public:
  struct LeafData {
    NodeId id = -1;
    std::string type;
    std::optional<std::int64_t> param;
  };

  /// A placeholder leaf; build real trees with the factories below.
  BipartiteTree() : impl_(LeafData{}) {}

  static BipartiteTree leaf(NodeId id, std::string type,
                            std::optional<std::int64_t> param = std::nullopt);
  static BipartiteTree node(BipartiteTree left, BipartiteTree right, JoinBundle bundle);

  bool is_leaf() const { return std::holds_alternative<LeafData>(impl_); }
  const LeafData& leaf_data() const { return std::get<LeafData>(impl_); }
  const BipartiteTree& left() const { return *std::get<NodeData_>(impl_).left; }
  const BipartiteTree& right() const { return *std::get<NodeData_>(impl_).right; }
  const JoinBundle& bundle() const { return std::get<NodeData_>(impl_).bundle; }

  /// Leaf ids in left-to-right order.
  std::vector<NodeId> leaf_ids() const;
  int leaf_count() const;

 private:
  struct NodeData_ {
    std::shared_ptr<const BipartiteTree> left;
    std::shared_ptr<const BipartiteTree> right;
    JoinBundle bundle;
  };
  std::variant<LeafData, NodeData_> impl_;
};

}  // namespace compose
