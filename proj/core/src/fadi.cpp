#include "teq/error.hpp"
#include "teq/lowrank_sylvester.hpp"
#include "teq/parallel.hpp"

#include <cmath>
#include <random>

namespace teq {

namespace {

void check_shapes(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs) {
  if (rhs.rows() != A1.size() || rhs.cols() != A2.size())
    throw DimensionError("low-rank Sylvester: rhs is " + std::to_string(rhs.rows()) + "x" +
                         std::to_string(rhs.cols()) + ", operators are " +
                         std::to_string(A1.size()) + " and " + std::to_string(A2.size()));
}

template <class F>
Matrix with_step(int step, F&& f) {
  try {
    return f();
  } catch (const SolverError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverError(step, e.what());
  }
}

// Y_1 = -(A2 + p_1)^{-1} V,  Y_{j+1} = Y_j + (q_j - p_{j+1}) (A2 + p_{j+1})^{-1} Y_j.
Matrix y_sequence(const SymmetricOperator& A2, const Matrix& V, const ShiftSet& sh) {
  const Index k = V.cols();
  Matrix Y(V.rows(), k * sh.s);
  Matrix cur = with_step(1, [&] { return Matrix(-A2.shifted_solve(sh.p[0], V)); });
  Y.leftCols(k) = cur;
  for (int j = 1; j < sh.s; ++j) {
    const Matrix step = with_step(j + 1, [&] { return A2.shifted_solve(sh.p[j], cur); });
    cur += (sh.q[j - 1] - sh.p[j]) * step;
    Y.middleCols(j * k, k) = cur;
  }
  return Y;
}

// W_1 = (A1 - q_1)^{-1} U,  W_{j+1} = W_j + (q_{j+1} - p_j) (A1 - q_{j+1})^{-1} W_j,
// each W_j scaled by (q_j - p_j).
Matrix w_sequence(const SymmetricOperator& A1, const Matrix& U, const ShiftSet& sh) {
  const Index k = U.cols();
  Matrix W(U.rows(), k * sh.s);
  Matrix cur = with_step(1, [&] { return A1.shifted_solve(-sh.q[0], U); });
  W.leftCols(k) = (sh.q[0] - sh.p[0]) * cur;
  for (int j = 1; j < sh.s; ++j) {
    const Matrix step = with_step(j + 1, [&] { return A1.shifted_solve(-sh.q[j], cur); });
    cur += (sh.q[j] - sh.p[j - 1]) * step;
    W.middleCols(j * k, k) = (sh.q[j] - sh.p[j]) * cur;
  }
  return W;
}

LowRank finish(LowRank X, const LowRankSolveOptions& opt) {
  if (opt.recompress_tol >= 0.0) return recompress(X, opt.recompress_tol);
  return X;
}

}  // namespace

LowRank fadi(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs_in,
             const ShiftSet& shifts, const LowRankSolveOptions& opt) {
  check_shapes(A1, A2, rhs_in);
  if (rhs_in.rank() == 0 || shifts.s == 0) return LowRank::zero(rhs_in.rows(), rhs_in.cols());
  const LowRank rhs = opt.orthonormalize_rhs ? orthonormalize_right(rhs_in) : rhs_in;
  Matrix W, Y;
  parallel_invoke(opt.parallel, [&] { W = w_sequence(A1, rhs.U, shifts); },
                  [&] { Y = y_sequence(A2, rhs.V, shifts); });
  return finish({std::move(W), std::move(Y)}, opt);
}

double lowrank_residual(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& X,
                        const LowRank& rhs) {
  const Index r = X.rank(), k = rhs.rank();
  Matrix L(A1.size(), 2 * r + k), R(A2.size(), 2 * r + k);
  L << A1.apply(X.U), X.U, -rhs.U;
  R << X.V, A2.apply(X.V), rhs.V;
  return LowRank(std::move(L), std::move(R)).norm();
}

double fadi_residual_exact(const Matrix& A1, const Matrix& A2, const LowRank& rhs,
                           const ShiftSet& shifts, int steps) {
  const int s = steps < 0 ? shifts.s : steps;
  Eigen::SelfAdjointEigenSolver<Matrix> e1(A1), e2(A2);
  Vector r1(A1.rows()), r2(A2.rows());
  for (Index i = 0; i < r1.size(); ++i) r1(i) = shifts.eval_prefix(e1.eigenvalues()(i), s);
  for (Index i = 0; i < r2.size(); ++i) r2(i) = 1.0 / shifts.eval_prefix(-e2.eigenvalues()(i), s);
  const Matrix& S1 = e1.eigenvectors();
  const Matrix& S2 = e2.eigenvectors();
  const Matrix L = S1 * (r1.asDiagonal() * (S1.transpose() * rhs.U));
  const Matrix R = S2 * (r2.asDiagonal() * (S2.transpose() * rhs.V));
  return LowRank(L, R).norm();
}

LowRank fadi_inexact(const SymmetricOperator& A1, const SymmetricOperator& A2,
                     const LowRank& rhs_in, const ShiftSet& sh, InexactnessProbe& probe,
                     const LowRankSolveOptions& opt) {
  check_shapes(A1, A2, rhs_in);
  const LowRank rhs = opt.orthonormalize_rhs ? orthonormalize_right(rhs_in) : rhs_in;
  probe.eta_norms.clear();
  probe.W.clear();
  probe.rhs_used = rhs;
  probe.rhs_u_norm = rhs.U.norm();
  probe.rhs_v_norm2 = rhs.rank() == 0 ? 0.0
                                      : Eigen::JacobiSVD<Matrix>(rhs.V).singularValues()(0);
  if (rhs.rank() == 0 || sh.s == 0) return LowRank::zero(rhs.rows(), rhs.cols());

  std::mt19937_64 rng(probe.seed);
  std::normal_distribution<double> nd;
  const double target = probe.eps_inject * probe.rhs_u_norm;
  auto eta = [&] {
    Matrix E(rhs.U.rows(), rhs.U.cols());
    for (Index i = 0; i < E.size(); ++i) E.data()[i] = nd(rng);
    const double n = E.norm();
    if (n > 0.0) E *= target / n;
    probe.eta_norms.push_back(E.norm());
    return E;
  };

  const Index k = rhs.rank();
  Matrix W(rhs.rows(), k * sh.s);
  Matrix cur = with_step(1, [&] { return A1.shifted_solve(-sh.q[0], rhs.U + eta()); });
  if (probe.keep_iterates) probe.W.push_back(cur);
  W.leftCols(k) = (sh.q[0] - sh.p[0]) * cur;
  for (int j = 1; j < sh.s; ++j) {
    const Matrix rhs_j = A1.apply(cur) - sh.p[j - 1] * cur + eta();
    cur = with_step(j + 1, [&] { return A1.shifted_solve(-sh.q[j], rhs_j); });
    if (probe.keep_iterates) probe.W.push_back(cur);
    W.middleCols(j * k, k) = (sh.q[j] - sh.p[j]) * cur;
  }
  Matrix Y = y_sequence(A2, rhs.V, sh);
  return finish({std::move(W), std::move(Y)}, opt);
}

Matrix sylvester_diag(const Matrix& A1, const Matrix& A2, const Matrix& C) {
  Eigen::SelfAdjointEigenSolver<Matrix> e1(A1), e2(A2);
  Matrix T = e1.eigenvectors().transpose() * C * e2.eigenvectors();
  for (Index j = 0; j < T.cols(); ++j)
    for (Index i = 0; i < T.rows(); ++i) {
      const double den = e1.eigenvalues()(i) + e2.eigenvalues()(j);
      if (!(den > 0.0)) throw StructureError("projected Sylvester operator is singular");
      T(i, j) /= den;
    }
  return e1.eigenvectors() * T * e2.eigenvectors().transpose();
}

}  // namespace teq
