#pragma once

#include "teq/tensor.hpp"

namespace teq {

// U * V^T with U m x r and V n x r.
struct LowRank {
  Matrix U;
  Matrix V;

  LowRank() = default;
  LowRank(Matrix u, Matrix v);
  static LowRank zero(Index m, Index n) { return {Matrix(m, 0), Matrix(n, 0)}; }

  Index rows() const noexcept { return U.rows(); }
  Index cols() const noexcept { return V.rows(); }
  Index rank() const noexcept { return U.cols(); }
  Matrix dense() const;
  double norm() const;  // Frobenius norm of U V^T without forming it
};

// Thin QR with Q of size m x min(m, r).
struct ThinQR {
  Matrix Q;
  Matrix R;
};
ThinQR thin_qr(const Matrix& A);

// Truncates to the minimal rank with ||U'V'^T - UV^T||_F <= tol ||UV^T||_F.
// The returned V has orthonormal columns.
LowRank recompress(const LowRank& L, double tol);
// Same with the absolute bound ||U'V'^T - UV^T||_F <= tol.
LowRank recompress_absolute(const LowRank& L, double tol);

// Replaces V by an orthonormal basis, folding the triangular factor into U.
LowRank orthonormalize_right(const LowRank& L);

// [U1 U2], [V1 V2].
LowRank concat(const LowRank& a, const LowRank& b);

// Orthonormal basis of range(A) by two passes of Gram-Schmidt against Q,
// dropping columns whose norm falls below drop_tol relative to their original norm.
Matrix orthonormal_extension(const Matrix& Q, const Matrix& A, double drop_tol);

}  // namespace teq
