#include "teq/error.hpp"
#include "teq/hmatrix.hpp"

namespace teq {

ClusterTree ClusterTree::build(Index n, Index n_min) {
  if (n < 1 || n_min < 1) throw DimensionError("cluster tree needs n >= 1 and n_min >= 1");
  ClusterTree t;
  t.n_ = n;
  t.n_min_ = n_min;
  t.nodes_.push_back({0, n, 0, {-1, -1}});
  // Breadth-first so nodes of one level are contiguous.
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    const Node cur = t.nodes_[i];
    t.depth_ = std::max(t.depth_, cur.level);
    if (cur.size <= n_min) continue;
    const Index first = (cur.size + 1) / 2;
    const int c0 = static_cast<int>(t.nodes_.size());
    t.nodes_.push_back({cur.offset, first, cur.level + 1, {-1, -1}});
    t.nodes_.push_back({cur.offset + first, cur.size - first, cur.level + 1, {-1, -1}});
    t.nodes_[i].child[0] = c0;
    t.nodes_[i].child[1] = c0 + 1;
  }
  return t;
}

std::vector<Index> ClusterTree::leaf_sizes() const {
  // Left-to-right order: walk the tree depth-first.
  std::vector<Index> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[i];
    if (nd.is_leaf()) {
      out.push_back(nd.size);
    } else {
      stack.push_back(nd.child[1]);
      stack.push_back(nd.child[0]);
    }
  }
  return out;
}

}  // namespace teq
