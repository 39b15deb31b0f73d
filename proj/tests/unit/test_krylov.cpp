#include "teq/generators.hpp"
#include "teq/lowrank_sylvester.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace teq;

namespace {

Matrix randn(Index m, Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix A(m, n);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
  return A;
}

IntervalPair laplace_pair(Index n) {
  const Vector ev = laplace1d_eigenvalues(n);
  return {ev.minCoeff(), ev.maxCoeff(), ev.minCoeff(), ev.maxCoeff()};
}

// Dense Sylvester solution by diagonalizing both coefficients.
Matrix dense_sylvester(const Matrix& A1, const Matrix& A2, const Matrix& C) {
  Eigen::SelfAdjointEigenSolver<Matrix> e1(A1), e2(A2);
  Matrix Ct = e1.eigenvectors().transpose() * C * e2.eigenvectors();
  for (Index i = 0; i < Ct.rows(); ++i)
    for (Index j = 0; j < Ct.cols(); ++j) Ct(i, j) /= e1.eigenvalues()(i) + e2.eigenvalues()(j);
  return e1.eigenvectors() * Ct * e2.eigenvectors().transpose();
}

}  // namespace

TEST(SylvesterDiag, MatchesDefinition) {
  const RandomSpd R1 = gen_random_spd_hss(12, 1.0, 2, 1), R2 = gen_random_spd_hss(9, 1.0, 2, 2);
  const Matrix C = randn(12, 9, 3);
  const Matrix Y = sylvester_diag(R1.A, R2.A, C);
  EXPECT_LE((R1.A * Y + Y * R2.A - C).norm(), 1e-13 * C.norm());
}

TEST(RationalKrylov, ZeroRhs) {
  const DenseOperator A(gen_laplace1d(16).dense());
  const LowRank X = rk_solve(A, A, LowRank::zero(16, 16), zolotarev_shifts(3, laplace_pair(16)));
  EXPECT_EQ(X.norm(), 0.0);
}

TEST(RationalKrylov, FullSpaceMatchesDense) {
  const Index n = 32;
  const Matrix A1 = gen_laplace1d(n).dense();
  const RandomSpd R = gen_random_spd_hss(n, 1.0, 2, 4);
  const DenseOperator op1(A1), op2(R.A);
  const IntervalPair pr{laplace1d_eigenvalues(n).minCoeff(), 4.0, R.D.minCoeff(), R.D.maxCoeff()};
  const LowRank rhs{randn(n, 2, 5), randn(n, 2, 6)};
  const LowRank X = rk_solve(op1, op2, rhs, zolotarev_shifts(20, pr));
  const Matrix ref = dense_sylvester(A1, R.A, rhs.dense());
  EXPECT_LE((X.dense() - ref).norm(), 1e-11 * ref.norm());
}

TEST(RationalKrylov, ResidualBound) {
  const Index n = 256;
  const HMatrixOperator A(HMatrix::from_banded(gen_laplace1d(n), 32));
  const IntervalPair pr = laplace_pair(n);
  const int s = shift_count_rk(1e-8, pr);
  const LowRank rhs = orthonormalize_right({randn(n, 2, 7), randn(n, 2, 8)});
  const LowRank X = rk_solve(A, A, rhs, zolotarev_shifts(s, pr));
  const double rel = lowrank_residual(A, A, X, rhs) / rhs.norm();
  EXPECT_LE(rel, 2 * (1 + pr.kappa()) * zolotarev_bound(s, pr));
  EXPECT_LE(rel, 1e-8);
}

TEST(ExtendedKrylov, ZeroRhs) {
  const DenseOperator A(gen_laplace1d(16).dense());
  const EkResult r = ek_solve(A, A, LowRank::zero(16, 16), 1e-8, 10);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.X.norm(), 0.0);
}

TEST(ExtendedKrylov, ConvergesOnLaplacian) {
  const Index n = 256;
  const HMatrixOperator A(HMatrix::from_banded(gen_laplace1d(n), 32));
  const LowRank rhs{randn(n, 2, 9), randn(n, 2, 10)};
  const EkResult r = ek_solve(A, A, rhs, 1e-8, 80);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(lowrank_residual(A, A, r.X, rhs), 1.01e-8 * rhs.norm());
  ASSERT_EQ(r.best.size(), r.residuals.size());
  for (std::size_t i = 1; i < r.best.size(); ++i) EXPECT_LE(r.best[i], r.best[i - 1]);
}

TEST(ExtendedKrylov, NonConvergenceReturnsBest) {
  const Index n = 128;
  const DenseOperator A(gen_laplace1d(n).dense());
  const LowRank rhs{randn(n, 1, 1), randn(n, 1, 2)};
  const EkResult r = ek_solve(A, A, rhs, 1e-14, 2);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_NEAR(lowrank_residual(A, A, r.X, rhs) / rhs.norm(), r.best.back(), 1e-6);
}
