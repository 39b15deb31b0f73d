#pragma once

#include "teq/banded.hpp"
#include "teq/lowrank.hpp"
#include "teq/tensor.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace teq {

// Binary tree of contiguous index ranges obtained by repeated halving.
class ClusterTree {
 public:
  struct Node {
    Index offset = 0;
    Index size = 0;
    int level = 0;
    int child[2] = {-1, -1};
    bool is_leaf() const noexcept { return child[0] < 0; }
  };

  static ClusterTree build(Index n, Index n_min);

  Index size() const noexcept { return n_; }
  Index n_min() const noexcept { return n_min_; }
  int depth() const noexcept { return depth_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& root() const { return nodes_.front(); }
  const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  std::vector<Index> leaf_sizes() const;

 private:
  Index n_ = 0, n_min_ = 1;
  int depth_ = 0;
  std::vector<Node> nodes_;
};

struct EigenPair {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

// Hierarchical off-diagonal low-rank (HODLR) symmetric matrix. Immutable;
// copies share the node tree. The upper off-diagonal block of an internal node
// is U V^T, the lower one is its transpose.
class HMatrix {
 public:
  struct Node {
    Index offset = 0;  // position inside the root matrix it was built from
    Index size = 0;
    std::uint64_t id = 0;
    std::shared_ptr<const Node> child[2];
    Matrix leaf;  // dense block, leaves only
    Matrix U, V;  // internal nodes only
    std::shared_ptr<const BandedMatrix> band;  // set when built from a band
    bool compression_capped = false;

    bool is_leaf() const noexcept { return !child[0]; }

    mutable std::once_flag eig_once;
    mutable EigenPair eig;
  };

  HMatrix() = default;
  explicit HMatrix(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  static HMatrix from_dense(const Matrix& A, const ClusterTree& tree, double tol,
                            Index max_rank = 1 << 30);
  static HMatrix from_banded(std::shared_ptr<const BandedMatrix> band, const ClusterTree& tree);
  static HMatrix from_banded(const BandedMatrix& band, Index n_min);
  static HMatrix identity(Index n, Index n_min);

  bool empty() const noexcept { return !root_; }
  Index size() const noexcept { return root_ ? root_->size : 0; }
  std::uint64_t id() const noexcept { return root_->id; }
  Index offset() const noexcept { return root_->offset; }
  bool is_leaf() const noexcept { return root_->is_leaf(); }
  bool is_banded() const noexcept { return static_cast<bool>(root_->band); }
  int depth() const;
  Index hss_rank() const;
  // True when some off-diagonal block hit max_rank before meeting tol.
  bool compression_warning() const;

  HMatrix child(int i) const;
  const Node& node() const { return *root_; }
  std::shared_ptr<const Node> node_ptr() const { return root_; }
  LowRank offdiag() const;  // upper off-diagonal block of this node

  Matrix dense() const;
  Matrix matvec(const Matrix& X) const;

  // (A + sigma I)^{-1} B. Uses banded Cholesky when the matrix came from a
  // band, recursive Woodbury elimination otherwise. One step of iterative
  // refinement is applied whenever the residual exceeds tol relative.
  Matrix shifted_solve(double sigma, const Matrix& B, double tol = 1e-13) const;

  // A - blkdiag(A11, A22) = Z1 Z2^T, rank 2k.
  LowRank top_offdiag_factor() const;

  struct OffDiagBlock {
    Index row_offset;  // relative to this matrix
    Index col_offset;
    LowRank factor;  // upper block; the lower block is its transpose
  };
  struct LevelSplit {
    std::vector<HMatrix> diag;
    std::vector<OffDiagBlock> off;
    Matrix dense_diag(Index n) const;
    Matrix dense_off(Index n) const;
  };
  LevelSplit level_split(int h) const;

  // Symmetric eigendecomposition of the dense block, computed once per node.
  const EigenPair& eig() const;

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace teq
