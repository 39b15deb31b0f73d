#include "teq/error.hpp"
#include "teq/lowrank_sylvester.hpp"

namespace teq {

namespace {

constexpr double kDeflate = 1e-12;

Matrix append(const Matrix& Q, const Matrix& ext) {
  Matrix out(Q.rows(), Q.cols() + ext.cols());
  out << Q, ext;
  return out;
}

// Nested rational Krylov basis: each new block is (A + shift_j I)^{-1} applied to
// the previous orthonormal block.
Matrix rk_basis(const SymmetricOperator& A, const Matrix& B, const std::vector<double>& shift) {
  Matrix Q = orthonormal_extension(Matrix(B.rows(), 0), B, kDeflate);
  Matrix last = Q;
  for (std::size_t j = 0; j < shift.size() && last.cols() > 0; ++j) {
    Matrix next;
    try {
      next = A.shifted_solve(shift[j], last);
    } catch (const std::exception& e) {
      throw SolverError(static_cast<int>(j) + 1, e.what());
    }
    last = orthonormal_extension(Q, next, kDeflate);
    Q = append(Q, last);
  }
  return Q;
}

Matrix projected(const SymmetricOperator& A, const Matrix& Q) {
  Matrix T = Q.transpose() * A.apply(Q);
  return 0.5 * (T + T.transpose());
}

}  // namespace

LowRank rk_solve(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs_in,
                 const ShiftSet& shifts, const LowRankSolveOptions& opt) {
  if (rhs_in.rows() != A1.size() || rhs_in.cols() != A2.size())
    throw DimensionError("rk_solve: rhs shape does not match the operators");
  if (rhs_in.rank() == 0 || rhs_in.norm() == 0.0) return LowRank::zero(rhs_in.rows(), rhs_in.cols());
  const LowRank rhs = opt.orthonormalize_rhs ? orthonormalize_right(rhs_in) : rhs_in;
  std::vector<double> s1(shifts.s), s2(shifts.s);
  for (int j = 0; j < shifts.s; ++j) {
    s1[j] = -shifts.q[j];
    s2[j] = shifts.p[j];
  }
  const Matrix Q1 = rk_basis(A1, rhs.U, s1);
  const Matrix Q2 = rk_basis(A2, rhs.V, s2);
  const Matrix C = (Q1.transpose() * rhs.U) * (Q2.transpose() * rhs.V).transpose();
  const Matrix Y = sylvester_diag(projected(A1, Q1), projected(A2, Q2), C);
  LowRank X(Q1 * Y, Q2);
  if (opt.recompress_tol >= 0.0) return recompress(X, opt.recompress_tol);
  return X;
}

}  // namespace teq
