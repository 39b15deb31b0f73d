#include "teq/hmatrix.hpp"

#include "teq/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace teq {

namespace {

std::uint64_t next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

using NodePtr = std::shared_ptr<HMatrix::Node>;

NodePtr build_dense(const Matrix& A, const ClusterTree& tree, int ti, double tol, Index max_rank) {
  const auto& tn = tree.node(ti);
  auto nd = std::make_shared<HMatrix::Node>();
  nd->offset = tn.offset;
  nd->size = tn.size;
  nd->id = next_id();
  if (tn.is_leaf()) {
    nd->leaf = A.block(tn.offset, tn.offset, tn.size, tn.size);
    return nd;
  }
  const auto& c0 = tree.node(tn.child[0]);
  const auto& c1 = tree.node(tn.child[1]);
  const Matrix B = A.block(c0.offset, c1.offset, c0.size, c1.size);
  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (r < s.size() && s(r) > 0.0 && s(r) >= tol * s(0)) ++r;
  }
  if (r > max_rank) {
    r = max_rank;
    nd->compression_capped = true;
  }
  nd->U = svd.matrixU().leftCols(r) * s.head(r).asDiagonal();
  nd->V = svd.matrixV().leftCols(r);
  nd->child[0] = build_dense(A, tree, tn.child[0], tol, max_rank);
  nd->child[1] = build_dense(A, tree, tn.child[1], tol, max_rank);
  return nd;
}

NodePtr build_band(const std::shared_ptr<const BandedMatrix>& band, const ClusterTree& tree, int ti) {
  const auto& tn = tree.node(ti);
  auto nd = std::make_shared<HMatrix::Node>();
  nd->offset = tn.offset;
  nd->size = tn.size;
  nd->id = next_id();
  nd->band = band;
  if (tn.is_leaf()) {
    nd->leaf = band->dense_block(tn.offset, tn.size, tn.offset, tn.size);
    return nd;
  }
  const auto& c0 = tree.node(tn.child[0]);
  const auto& c1 = tree.node(tn.child[1]);
  // Only the bottom-left corner of the upper block is inside the band.
  const Index bw = band->bandwidth();
  const Index b0 = std::min(bw, c0.size), b1 = std::min(bw, c1.size);
  nd->U = Matrix::Zero(c0.size, 0);
  nd->V = Matrix::Zero(c1.size, 0);
  if (b0 > 0 && b1 > 0) {
    const Matrix C = band->dense_block(c0.offset + c0.size - b0, b0, c1.offset, b1);
    Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    Index r = 0;
    if (s(0) > 0.0)
      while (r < s.size() && s(r) > 1e-15 * s(0)) ++r;
    nd->U = Matrix::Zero(c0.size, r);
    nd->V = Matrix::Zero(c1.size, r);
    nd->U.bottomRows(b0) = svd.matrixU().leftCols(r) * s.head(r).asDiagonal();
    nd->V.topRows(b1) = svd.matrixV().leftCols(r);
  }
  nd->child[0] = build_band(band, tree, tn.child[0]);
  nd->child[1] = build_band(band, tree, tn.child[1]);
  return nd;
}

void densify(const HMatrix::Node& nd, Index base, Matrix& out) {
  const Index o = nd.offset - base;
  if (nd.is_leaf()) {
    out.block(o, o, nd.size, nd.size) = nd.leaf;
    return;
  }
  const Index n0 = nd.child[0]->size, n1 = nd.child[1]->size;
  if (nd.U.cols() > 0) {
    const Matrix B = nd.U * nd.V.transpose();
    out.block(o, o + n0, n0, n1) = B;
    out.block(o + n0, o, n1, n0) = B.transpose();
  } else {
    out.block(o, o + n0, n0, n1).setZero();
    out.block(o + n0, o, n1, n0).setZero();
  }
  densify(*nd.child[0], base, out);
  densify(*nd.child[1], base, out);
}

Matrix matvec_rec(const HMatrix::Node& nd, const Matrix& X) {
  if (nd.is_leaf()) return nd.leaf * X;
  const Index n0 = nd.child[0]->size, n1 = nd.child[1]->size;
  Matrix Y(nd.size, X.cols());
  Y.topRows(n0) = matvec_rec(*nd.child[0], X.topRows(n0));
  Y.bottomRows(n1) = matvec_rec(*nd.child[1], X.bottomRows(n1));
  if (nd.U.cols() > 0) {
    Y.topRows(n0).noalias() += nd.U * (nd.V.transpose() * X.bottomRows(n1));
    Y.bottomRows(n1).noalias() += nd.V * (nd.U.transpose() * X.topRows(n0));
  }
  return Y;
}

Matrix solve_rec(const HMatrix::Node& nd, double sigma, const Matrix& B) {
  if (nd.band) return nd.band->shifted_solve(nd.offset, nd.size, sigma, B);
  if (nd.is_leaf()) {
    Matrix M = nd.leaf;
    M.diagonal().array() += sigma;
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) throw IndefiniteError(nd.offset, nd.size, sigma);
    return llt.solve(B);
  }
  const Index n0 = nd.child[0]->size, n1 = nd.child[1]->size;
  const Index m = B.cols(), r = nd.U.cols();
  if (r == 0) {
    Matrix X(nd.size, m);
    X.topRows(n0) = solve_rec(*nd.child[0], sigma, B.topRows(n0));
    X.bottomRows(n1) = solve_rec(*nd.child[1], sigma, B.bottomRows(n1));
    return X;
  }
  // Woodbury with A + sigma I = D + Z C Z^T, Z = blkdiag(U, V), C = [0 I; I 0].
  Matrix R0(n0, m + r), R1(n1, m + r);
  R0 << B.topRows(n0), nd.U;
  R1 << B.bottomRows(n1), nd.V;
  const Matrix Y0 = solve_rec(*nd.child[0], sigma, R0);
  const Matrix Y1 = solve_rec(*nd.child[1], sigma, R1);
  Matrix S(2 * r, 2 * r);
  S.topLeftCorner(r, r) = nd.U.transpose() * Y0.rightCols(r);
  S.bottomRightCorner(r, r) = nd.V.transpose() * Y1.rightCols(r);
  S.topRightCorner(r, r).setIdentity();
  S.bottomLeftCorner(r, r).setIdentity();
  Matrix rhs(2 * r, m);
  rhs.topRows(r) = nd.U.transpose() * Y0.leftCols(m);
  rhs.bottomRows(r) = nd.V.transpose() * Y1.leftCols(m);
  const Matrix T = S.partialPivLu().solve(rhs);
  Matrix X(nd.size, m);
  X.topRows(n0) = Y0.leftCols(m) - Y0.rightCols(r) * T.topRows(r);
  X.bottomRows(n1) = Y1.leftCols(m) - Y1.rightCols(r) * T.bottomRows(r);
  return X;
}

int depth_rec(const HMatrix::Node& nd) {
  if (nd.is_leaf()) return 0;
  return 1 + std::max(depth_rec(*nd.child[0]), depth_rec(*nd.child[1]));
}

Index rank_rec(const HMatrix::Node& nd) {
  if (nd.is_leaf()) return 0;
  return std::max({nd.U.cols(), rank_rec(*nd.child[0]), rank_rec(*nd.child[1])});
}

bool capped_rec(const HMatrix::Node& nd) {
  if (nd.compression_capped) return true;
  if (nd.is_leaf()) return false;
  return capped_rec(*nd.child[0]) || capped_rec(*nd.child[1]);
}

}  // namespace

HMatrix HMatrix::from_dense(const Matrix& A, const ClusterTree& tree, double tol, Index max_rank) {
  if (A.rows() != A.cols() || A.rows() != tree.size())
    throw DimensionError("from_dense: matrix size does not match the cluster tree");
  const double asym = (A - A.transpose()).norm();
  if (asym > 1e-12 * A.norm())
    throw StructureError("from_dense: matrix is not symmetric (||A - A^T||_F = " +
                         std::to_string(asym) + ")");
  const Matrix S = 0.5 * (A + A.transpose());
  return HMatrix(build_dense(S, tree, 0, tol, max_rank));
}

HMatrix HMatrix::from_banded(std::shared_ptr<const BandedMatrix> band, const ClusterTree& tree) {
  if (band->size() != tree.size()) throw DimensionError("from_banded: size does not match tree");
  return HMatrix(build_band(band, tree, 0));
}

HMatrix HMatrix::from_banded(const BandedMatrix& band, Index n_min) {
  return from_banded(std::make_shared<const BandedMatrix>(band),
                     ClusterTree::build(band.size(), n_min));
}

HMatrix HMatrix::identity(Index n, Index n_min) {
  BandedMatrix id(n, 0, Matrix::Ones(1, n));
  return from_banded(id, n_min);
}

int HMatrix::depth() const { return depth_rec(*root_); }
Index HMatrix::hss_rank() const { return rank_rec(*root_); }
bool HMatrix::compression_warning() const { return capped_rec(*root_); }

HMatrix HMatrix::child(int i) const {
  if (is_leaf()) throw StructureError("leaf HMatrix has no children");
  return HMatrix(root_->child[i]);
}

LowRank HMatrix::offdiag() const {
  if (is_leaf()) throw StructureError("leaf HMatrix has no off-diagonal block");
  return {root_->U, root_->V};
}

Matrix HMatrix::dense() const {
  Matrix out(size(), size());
  densify(*root_, root_->offset, out);
  return out;
}

Matrix HMatrix::matvec(const Matrix& X) const {
  if (X.rows() != size())
    throw DimensionError("matvec: expected " + std::to_string(size()) + " rows, got " +
                         std::to_string(X.rows()));
  return matvec_rec(*root_, X);
}

Matrix HMatrix::shifted_solve(double sigma, const Matrix& B, double tol) const {
  if (B.rows() != size())
    throw DimensionError("shifted_solve: expected " + std::to_string(size()) + " rows, got " +
                         std::to_string(B.rows()));
  if (B.cols() == 0) return Matrix(size(), 0);
  Matrix X = solve_rec(*root_, sigma, B);
  if (root_->band || root_->is_leaf() || tol <= 0.0) return X;
  const double bn = B.norm();
  for (int it = 0; it < 2; ++it) {
    Matrix R = B - matvec(X) - sigma * X;
    if (R.norm() <= tol * bn) break;
    X += solve_rec(*root_, sigma, R);
  }
  return X;
}

LowRank HMatrix::top_offdiag_factor() const {
  if (is_leaf()) throw StructureError("top_offdiag_factor needs a matrix of depth >= 1");
  const Index n0 = root_->child[0]->size, n1 = root_->child[1]->size, r = root_->U.cols();
  Matrix Z1 = Matrix::Zero(size(), 2 * r), Z2 = Matrix::Zero(size(), 2 * r);
  Z1.topLeftCorner(n0, r) = root_->U;
  Z1.bottomRightCorner(n1, r) = root_->V;
  Z2.topRightCorner(n0, r) = root_->U;
  Z2.bottomLeftCorner(n1, r) = root_->V;
  return {std::move(Z1), std::move(Z2)};
}

namespace {

void split_rec(const std::shared_ptr<const HMatrix::Node>& nd, int level, int h, Index base,
               HMatrix::LevelSplit& out) {
  if (level == h || nd->is_leaf()) {
    out.diag.emplace_back(nd);
    return;
  }
  out.off.push_back({nd->offset - base, nd->offset + nd->child[0]->size - base, {nd->U, nd->V}});
  split_rec(nd->child[0], level + 1, h, base, out);
  split_rec(nd->child[1], level + 1, h, base, out);
}

}  // namespace

HMatrix::LevelSplit HMatrix::level_split(int h) const {
  if (h < 0 || h > depth())
    throw RangeError("level " + std::to_string(h) + " outside [0, " + std::to_string(depth()) + "]");
  LevelSplit out;
  split_rec(root_, 0, h, root_->offset, out);
  return out;
}

Matrix HMatrix::LevelSplit::dense_diag(Index n) const {
  Matrix M = Matrix::Zero(n, n);
  if (diag.empty()) return M;
  const Index base = diag.front().offset();
  for (const auto& D : diag) M.block(D.offset() - base, D.offset() - base, D.size(), D.size()) = D.dense();
  return M;
}

Matrix HMatrix::LevelSplit::dense_off(Index n) const {
  Matrix M = Matrix::Zero(n, n);
  for (const auto& b : off) {
    const Matrix B = b.factor.dense();
    M.block(b.row_offset, b.col_offset, B.rows(), B.cols()) += B;
    M.block(b.col_offset, b.row_offset, B.cols(), B.rows()) += B.transpose();
  }
  return M;
}

const EigenPair& HMatrix::eig() const {
  std::call_once(root_->eig_once, [this] {
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense());
    root_->eig.values = es.eigenvalues();
    root_->eig.vectors = es.eigenvectors();
  });
  return root_->eig;
}

}  // namespace teq
