#include "teq/error.hpp"
#include "teq/lowrank_sylvester.hpp"

#include <limits>

namespace teq {

namespace {

constexpr double kDeflate = 1e-12;

// Extended Krylov space span{B, A B, A^{-1} B, A^2 B, A^{-2} B, ...}, grown one
// block pair per call to extend().
struct ExtendedBasis {
  const SymmetricOperator& A;
  Matrix Q, AQ;    // basis and A times basis
  Matrix P, AP;    // last block reached by multiplication
  Matrix N;        // last block reached by inversion

  ExtendedBasis(const SymmetricOperator& op, const Matrix& B) : A(op) {
    Q = orthonormal_extension(Matrix(B.rows(), 0), B, kDeflate);
    AQ = A.apply(Q);
    P = Q;
    AP = AQ;
    N = Q;
  }

  void add(const Matrix& ext, Matrix& blk, Matrix* Ablk) {
    const Matrix Aext = A.apply(ext);
    Matrix q(Q.rows(), Q.cols() + ext.cols()), aq(Q.rows(), Q.cols() + ext.cols());
    q << Q, ext;
    aq << AQ, Aext;
    Q = std::move(q);
    AQ = std::move(aq);
    blk = ext;
    if (Ablk) *Ablk = Aext;
  }

  bool extend(int step) {
    const Index before = Q.cols();
    Matrix inv;
    try {
      inv = N.cols() > 0 ? A.shifted_solve(0.0, N) : Matrix(Q.rows(), 0);
    } catch (const std::exception& e) {
      throw SolverError(step, e.what());
    }
    const Matrix mul = AP;
    Matrix ext_p = orthonormal_extension(Q, mul, kDeflate);
    add(ext_p, P, &AP);
    Matrix ext_n = orthonormal_extension(Q, inv, kDeflate);
    add(ext_n, N, nullptr);
    return Q.cols() > before;
  }

  Matrix projected() const {
    Matrix T = Q.transpose() * AQ;
    return 0.5 * (T + T.transpose());
  }
};

}  // namespace

EkResult ek_solve(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs_in,
                  double tol, int max_iter, const LowRankSolveOptions& opt) {
  if (rhs_in.rows() != A1.size() || rhs_in.cols() != A2.size())
    throw DimensionError("ek_solve: rhs shape does not match the operators");
  EkResult res;
  res.X = LowRank::zero(rhs_in.rows(), rhs_in.cols());
  const double rhs_norm = rhs_in.norm();
  if (rhs_in.rank() == 0 || rhs_norm == 0.0) {
    res.converged = true;
    return res;
  }
  const LowRank rhs = opt.orthonormalize_rhs ? orthonormalize_right(rhs_in) : rhs_in;
  ExtendedBasis b1(A1, rhs.U), b2(A2, rhs.V);
  double best = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix C = (b1.Q.transpose() * rhs.U) * (b2.Q.transpose() * rhs.V).transpose();
    const Matrix Y = sylvester_diag(b1.projected(), b2.projected(), C);
    // Residual [A1 Q1 Y, Q1 Y, -U] [Q2, A2 Q2, V]^T without touching A again.
    const Index r = Y.cols(), k = rhs.rank();
    Matrix L(rhs.rows(), 2 * r + k), R(rhs.cols(), 2 * r + k);
    L << b1.AQ * Y, b1.Q * Y, -rhs.U;
    R << b2.Q, b2.AQ, rhs.V;
    const double rel = LowRank(std::move(L), std::move(R)).norm() / rhs_norm;
    res.iterations = it;
    res.residuals.push_back(rel);
    if (rel < best) {
      best = rel;
      res.X = LowRank(b1.Q * Y, b2.Q);
    }
    res.best.push_back(best);
    if (rel <= tol) {
      res.converged = true;
      break;
    }
    if (it == max_iter) break;
    const bool grew1 = b1.extend(it), grew2 = b2.extend(it);
    if (!grew1 && !grew2) break;
  }
  if (opt.recompress_tol >= 0.0) res.X = recompress(res.X, opt.recompress_tol);
  return res;
}

}  // namespace teq
