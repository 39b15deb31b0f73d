#include "teq/error.hpp"
#include "teq/generators.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace teq;

TEST(Laplace1d, SmallCases) {
  EXPECT_EQ(gen_laplace1d(1).dense(), Matrix::Constant(1, 1, 2.0));
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(gen_laplace1d(3).dense()).eigenvalues();
  EXPECT_NEAR(ev(0), 2 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(ev(1), 2.0, 1e-14);
  EXPECT_NEAR(ev(2), 2 + std::sqrt(2.0), 1e-14);
  EXPECT_GT(ev.minCoeff(), 0.0);
}

TEST(Laplace1d, AnalyticEigenpairs) {
  const Index n = 20;
  const Matrix T = gen_laplace1d(n).dense();
  const Vector lam = laplace1d_eigenvalues(n);
  const Matrix Q = laplace1d_eigenvectors(n);
  for (Index j = 1; j < n; ++j) EXPECT_GT(lam(j - 1), lam(j));
  EXPECT_NEAR(lam(0), 2 + 2 * std::cos(std::numbers::pi / (n + 1)), 1e-14);
  EXPECT_LE((T * Q - Q * lam.asDiagonal()).norm(), 1e-13);
  EXPECT_LE((Q.transpose() * Q - Matrix::Identity(n, n)).norm(), 1e-13);
}

TEST(ShiftedLaplace, TargetCondition) {
  for (double kappa : {10.0, 1e4, 1e8}) {
    const Index n = 64;
    const double c = shift_for_condition(n, kappa);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(gen_shifted_laplace(n, c).dense()).eigenvalues();
    EXPECT_NEAR(ev.maxCoeff() / ev.minCoeff(), kappa, 1e-6 * kappa);
  }
  EXPECT_THROW(shift_for_condition(10, 0.5), ConfigError);
}

TEST(Fractional, Weights) {
  const Vector g = grunwald_weights(6, 1.5);
  EXPECT_EQ(g(0), 1.0);
  EXPECT_DOUBLE_EQ(g(1), -1.5);
  for (Index k = 1; k < 6; ++k) EXPECT_DOUBLE_EQ(g(k), g(k - 1) * (k - 1 - 1.5) / k);
  // Order 2 reduces to the second difference stencil.
  const Vector g2 = grunwald_weights(5, 2.0);
  EXPECT_DOUBLE_EQ(g2(0), 1.0);
  EXPECT_DOUBLE_EQ(g2(1), -2.0);
  EXPECT_DOUBLE_EQ(g2(2), 1.0);
  EXPECT_DOUBLE_EQ(g2(3), 0.0);
}

TEST(Fractional, ApproachesLaplacianAndIsSpd) {
  const Matrix F = gen_fractional_gl(12, 1.999999);
  const Matrix T = gen_laplace1d(12).dense();
  // L_ij = g_{i-j+1}: the symmetrized stencil near order 2 is (T + corner terms) / 2 scaled;
  // every entry converges to the tridiagonal Laplacian.
  EXPECT_LE((F - T).cwiseAbs().maxCoeff(), 1e-5);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(gen_fractional_gl(256, 1.5)).eigenvalues();
  EXPECT_GT(ev.minCoeff(), 0.0);
  EXPECT_LE(ev.maxCoeff(), std::pow(2.0, 1.5) + 1e-12);
  EXPECT_THROW(gen_fractional_gl(8, 2.5), ConfigError);
}

TEST(RandomSpd, StructureAndDeterminism) {
  const RandomSpd R0 = gen_random_spd_hss(32, 1.0, 0, 1);
  // band 0: Q is diagonal with +-1 entries.
  EXPECT_LE((R0.Q.cwiseAbs() - Matrix::Identity(32, 32)).norm(), 1e-14);
  const Vector sorted = Eigen::SelfAdjointEigenSolver<Matrix>(R0.A).eigenvalues();
  const Vector lam = laplace1d_eigenvalues(32);
  EXPECT_LE((sorted - lam.reverse()).norm(), 1e-13);

  for (double p : {1.0, 1.7}) {
    const RandomSpd R = gen_random_spd_hss(64, p, 8, 5);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(R.A).eigenvalues();
    const Vector l64 = laplace1d_eigenvalues(64);
    EXPECT_NEAR(ev.maxCoeff() / ev.minCoeff(), std::pow(l64.maxCoeff() / l64.minCoeff(), p),
                1e-8 * std::pow(l64.maxCoeff() / l64.minCoeff(), p));
    const RandomSpd again = gen_random_spd_hss(64, p, 8, 5);
    EXPECT_EQ(again.A, R.A);
  }
  EXPECT_THROW(gen_random_spd_hss(8, 0.5, 2, 1), ConfigError);
}

TEST(RandomSpd, HssRankAtMostBand) {
  const RandomSpd R = gen_random_spd_hss(256, 1.0, 8, 1);
  const HMatrix H = HMatrix::from_dense(R.A, ClusterTree::build(256, 32), 1e-12);
  EXPECT_LE(H.hss_rank(), 8);
}

TEST(AccuracyRhs, Weights) {
  const Matrix Q = laplace1d_eigenvectors(5);
  const Matrix C = accuracy_rhs(Q);
  const Matrix S = Q.transpose() * C * Q;
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(S(i, i), std::pow(i / 4.0, 10), 1e-14);
}

TEST(Generators, SpecsAndNames) {
  for (const char* name : {"laplace1d", "shifted_laplace", "fractional_gl", "random_spd_hss"})
    EXPECT_STREQ(to_string(generator_from_string(name)), name);
  EXPECT_THROW(generator_from_string("poisson"), ConfigError);
  GeneratorSpec spec;
  spec.kind = GeneratorKind::fractional_gl;
  spec.n = 128;
  const HMatrix H = build_coefficient(spec, 32);
  EXPECT_EQ(H.size(), 128);
  EXPECT_FALSE(H.is_banded());
  spec.kind = GeneratorKind::laplace1d;
  EXPECT_TRUE(build_coefficient(spec, 32).is_banded());
  EXPECT_EQ(build_coefficient(spec, 32).dense(), build_coefficient(spec, 32).dense());
}
