#include "teq/generators.hpp"

#include "teq/error.hpp"
#include "teq/lowrank.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace teq {

BandedMatrix gen_laplace1d(Index n) { return gen_shifted_laplace(n, 0.0); }

BandedMatrix gen_shifted_laplace(Index n, double shift) {
  if (n < 1) throw DimensionError("laplace1d needs n >= 1");
  Matrix band = Matrix::Zero(2, n);
  band.row(0).setConstant(2.0 + shift);
  if (n > 1) band.row(1).head(n - 1).setConstant(-1.0);
  if (n == 1) return BandedMatrix(1, 0, band.topRows(1));
  return BandedMatrix(n, 1, band);
}

Vector laplace1d_eigenvalues(Index n) {
  Vector d(n);
  for (Index j = 1; j <= n; ++j) d(j - 1) = 2.0 + 2.0 * std::cos(std::numbers::pi * j / (n + 1.0));
  return d;
}

Matrix laplace1d_eigenvectors(Index n) {
  // 2 + 2 cos(pi j/(n+1)) = 2 - 2 cos(pi m/(n+1)) with m = n + 1 - j.
  Matrix Q(n, n);
  const double c = std::sqrt(2.0 / (n + 1.0));
  for (Index j = 1; j <= n; ++j) {
    const Index m = n + 1 - j;
    for (Index i = 1; i <= n; ++i) Q(i - 1, j - 1) = c * std::sin(std::numbers::pi * i * m / (n + 1.0));
  }
  return Q;
}

double shift_for_condition(Index n, double kappa) {
  if (!(kappa > 1.0)) throw ConfigError("target condition number must exceed 1");
  const Vector d = laplace1d_eigenvalues(n);
  const double lmax = d.maxCoeff(), lmin = d.minCoeff();
  return (lmax - kappa * lmin) / (kappa - 1.0);
}

Vector grunwald_weights(Index count, double order) {
  Vector g(count);
  if (count == 0) return g;
  g(0) = 1.0;
  for (Index k = 1; k < count; ++k) g(k) = g(k - 1) * (k - 1.0 - order) / k;
  return g;
}

Matrix gen_fractional_gl(Index n, double order) {
  if (!(order > 1.0 && order < 2.0)) throw ConfigError("fractional order must lie in (1, 2)");
  const Vector g = grunwald_weights(n + 1, order);
  Matrix L = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = std::max<Index>(0, j - 1); i < n; ++i) L(i, j) = g(i - j + 1);
  Matrix A = -0.5 * (L + L.transpose());
  if (Eigen::LLT<Matrix>(A).info() != Eigen::Success)
    throw StructureError("fractional Grunwald-Letnikov matrix failed the positive definiteness probe");
  return A;
}

RandomSpd gen_random_spd_hss(Index n, double p, Index band, std::uint64_t seed) {
  if (!(p >= 1.0)) throw ConfigError("random_spd_hss needs p >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix M = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n && i <= j + band; ++i) M(i, j) = nd(rng);
  RandomSpd out;
  out.Q = thin_qr(M).Q;
  out.D = laplace1d_eigenvalues(n).array().pow(p);
  out.A = out.Q * out.D.asDiagonal() * out.Q.transpose();
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  return out;
}

Matrix accuracy_rhs(const Matrix& Q) {
  const Index n = Q.cols();
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = n > 1 ? std::pow(static_cast<double>(i) / (n - 1.0), 10) : 1.0;
  return Q * s.asDiagonal() * Q.transpose();
}

GeneratorKind generator_from_string(const std::string& s) {
  if (s == "laplace1d" || s == "laplace") return GeneratorKind::laplace1d;
  if (s == "shifted_laplace") return GeneratorKind::shifted_laplace;
  if (s == "fractional_gl" || s == "fractional") return GeneratorKind::fractional_gl;
  if (s == "random_spd_hss" || s == "random") return GeneratorKind::random_spd_hss;
  throw ConfigError("unknown generator '" + s + "'");
}

const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::laplace1d: return "laplace1d";
    case GeneratorKind::shifted_laplace: return "shifted_laplace";
    case GeneratorKind::fractional_gl: return "fractional_gl";
    case GeneratorKind::random_spd_hss: return "random_spd_hss";
  }
  return "?";
}

HMatrix build_coefficient(const GeneratorSpec& spec, Index n_min, double tol) {
  switch (spec.kind) {
    case GeneratorKind::laplace1d:
      return HMatrix::from_banded(gen_laplace1d(spec.n), n_min);
    case GeneratorKind::shifted_laplace: {
      const BandedMatrix T = gen_shifted_laplace(spec.n, spec.shift);
      // Cheap positivity probe: the smallest Laplacian eigenvalue plus the shift.
      if (!(laplace1d_eigenvalues(spec.n).minCoeff() + spec.shift > 0.0))
        throw StructureError("shifted Laplacian is not positive definite");
      return HMatrix::from_banded(T, n_min);
    }
    case GeneratorKind::fractional_gl:
      return HMatrix::from_dense(gen_fractional_gl(spec.n, spec.order),
                                 ClusterTree::build(spec.n, n_min), tol);
    case GeneratorKind::random_spd_hss:
      return HMatrix::from_dense(gen_random_spd_hss(spec.n, spec.power, spec.band, spec.seed).A,
                                 ClusterTree::build(spec.n, n_min), tol);
  }
  throw ConfigError("unknown generator kind");
}

}  // namespace teq
