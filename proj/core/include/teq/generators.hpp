#pragma once

#include "teq/banded.hpp"
#include "teq/hmatrix.hpp"

#include <cstdint>
#include <string>

namespace teq {

// Tridiagonal (-1, 2, -1).
BandedMatrix gen_laplace1d(Index n);
// Eigenvalues 2 + 2 cos(pi j / (n + 1)), j = 1..n (descending).
Vector laplace1d_eigenvalues(Index n);
// Orthonormal eigenvectors matching laplace1d_eigenvalues column by column.
Matrix laplace1d_eigenvectors(Index n);

BandedMatrix gen_shifted_laplace(Index n, double shift);
// Shift c with cond(T + c I) = kappa for the n x n Laplacian T.
double shift_for_condition(Index n, double kappa);

// Grunwald-Letnikov weights g_0 = 1, g_k = g_{k-1} (k - 1 - order) / k.
Vector grunwald_weights(Index count, double order);
// Symmetrized shifted Grunwald-Letnikov matrix -(L + L^T) / 2 with L_ij = g_{i-j+1}.
// The grid factor h^{-order} is left out so the spectrum stays inside (0, 2^order]
// for every n. Throws StructureError when the Cholesky probe fails.
Matrix gen_fractional_gl(Index n, double order);

struct RandomSpd {
  Matrix A;  // Q diag(D^p) Q^T
  Matrix Q;
  Vector D;  // eigenvalues of A, ordered like the columns of Q
};
// Q from the QR factorization of a random matrix with lower bandwidth `band`,
// D the 1D Laplacian eigenvalues raised to the power p.
RandomSpd gen_random_spd_hss(Index n, double p, Index band, std::uint64_t seed);

// Q S Q^T with S_ii = ((i - 1) / (n - 1))^10, stressing the smallest eigenvalues
// when Q's columns are ordered by descending eigenvalue.
Matrix accuracy_rhs(const Matrix& Q);

enum class GeneratorKind { laplace1d, shifted_laplace, fractional_gl, random_spd_hss };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::laplace1d;
  Index n = 64;
  double order = 1.5;   // fractional_gl
  double power = 1.0;   // random_spd_hss
  Index band = 8;       // random_spd_hss
  std::uint64_t seed = 1;
  double shift = 0.0;   // shifted_laplace
};

GeneratorKind generator_from_string(const std::string& s);
const char* to_string(GeneratorKind k);

// Hierarchical coefficient for the spec. Band generators keep banded solves;
// dense generators are compressed with relative tolerance tol.
HMatrix build_coefficient(const GeneratorSpec& spec, Index n_min, double tol = 1e-14);

}  // namespace teq
