#pragma once

#include "teq/lowrank.hpp"
#include "teq/operators.hpp"
#include "teq/zolotarev.hpp"

#include <cstdint>
#include <vector>

namespace teq {

// Solvers for A1 X + X A2 = U V^T with SPD A1, A2 and a factored solution.

struct LowRankSolveOptions {
  // Relative truncation of the returned factors; negative keeps them raw.
  double recompress_tol = 0.0;
  // Orthonormalize V of the right-hand side first, folding R into U.
  bool orthonormalize_rhs = true;
  // Run the two independent fADI recursions concurrently.
  bool parallel = false;
};

LowRank fadi(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs,
             const ShiftSet& shifts, const LowRankSolveOptions& opt = {});

// ||A1 X + X A2 - U V^T||_F for X = Wx Yx^T, from the factors only.
double lowrank_residual(const SymmetricOperator& A1, const SymmetricOperator& A2,
                        const LowRank& X, const LowRank& rhs);

// Closed form ||r_s(A1) U V^T r_s(-A2)^{-1}||_F from dense eigendecompositions.
// The first `steps` shifts are used (all of them when steps < 0).
double fadi_residual_exact(const Matrix& A1, const Matrix& A2, const LowRank& rhs,
                           const ShiftSet& shifts, int steps = -1);

struct InexactnessProbe {
  double eps_inject = 0.0;
  std::uint64_t seed = 1;
  bool keep_iterates = true;
  // Filled by fadi_inexact.
  std::vector<double> eta_norms;  // Frobenius norms of the injected terms
  std::vector<Matrix> W;          // perturbed W_j, j = 1..s
  double rhs_u_norm = 0.0;        // ||U||_F after orthonormalization of V
  double rhs_v_norm2 = 0.0;       // ||V||_2 after orthonormalization of V
  LowRank rhs_used;               // the right-hand side after orthonormalization
};

// fADI whose W recursion is perturbed as
//   (A1 - q_{j+1}) W_{j+1} = (A1 - p_j) W_j + eta_{j+1},  (A1 - q_1) W_1 = U + eta_1,
// with random eta of Frobenius norm eps_inject ||U||_F.
LowRank fadi_inexact(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs,
                     const ShiftSet& shifts, InexactnessProbe& probe,
                     const LowRankSolveOptions& opt = {});

// Galerkin projection on rational Krylov spaces. A1's space uses the poles q_j,
// A2's space the poles -p_j, so every solve is with an SPD matrix.
LowRank rk_solve(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs,
                 const ShiftSet& shifts, const LowRankSolveOptions& opt = {});

struct EkResult {
  LowRank X;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residuals;  // relative residual of each iterate
  std::vector<double> best;       // running minimum of residuals
};

EkResult ek_solve(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs,
                  double tol, int max_iter, const LowRankSolveOptions& opt = {});

// Dense solve of A1 Y + Y A2 = C by diagonalization (small projected problems).
Matrix sylvester_diag(const Matrix& A1, const Matrix& A2, const Matrix& C);

}  // namespace teq
