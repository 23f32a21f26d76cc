#include "rdet/tree.hpp"

namespace rdet {

Tree Tree::from_nodes(std::vector<TreeNode> nodes) {
  if (nodes.empty()) throw CorruptModelFile("tree has no nodes");
  const int n = static_cast<int>(nodes.size());
  for (int i = 0; i < n; ++i) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
    if (nd.is_leaf()) continue;
    // Preorder layout: children strictly after the parent, so routing
    // always terminates.
    if (nd.left <= i || nd.left >= n || nd.right <= i || nd.right >= n)
      throw CorruptModelFile("tree node has out-of-order child indices");
  }
  Tree t;
  t.nodes_ = std::move(nodes);
  return t;
}

double Tree::predict_one(FeatureRef x) const {
  int i = 0;
  while (true) {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(i)];
    if (nd.is_leaf()) return nd.value;
    if (nd.feature >= x.size())
      throw FeatureIndexOutOfRange("tree expects feature " + std::to_string(nd.feature) +
                                   " but input has " + std::to_string(x.size()));
    i = x[nd.feature] < nd.threshold ? nd.left : nd.right;
  }
}

int Tree::depth() const {
  if (nodes_.empty()) return 0;
  // Children sit after parents, so one backward-free pass suffices.
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& nd = nodes_[i];
    deepest = std::max(deepest, level[i]);
    if (nd.is_leaf()) continue;
    level[static_cast<std::size_t>(nd.left)] = level[i] + 1;
    level[static_cast<std::size_t>(nd.right)] = level[i] + 1;
  }
  return deepest;
}

}  // namespace rdet
