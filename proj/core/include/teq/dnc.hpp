#pragma once

#include "teq/hmatrix.hpp"
#include "teq/lowrank.hpp"
#include "teq/operators.hpp"
#include "teq/spectra.hpp"
#include "teq/tensor.hpp"
#include "teq/zolotarev.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace teq {

// H + shift I.
struct Coefficient {
  HMatrix H;
  double shift = 0.0;
  Index size() const { return H.size(); }
};

enum class Backend { fadi, rk, ek };
enum class ShiftPolicy { a_priori, fixed_count };

const char* to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct SolverConfig {
  double eps = 1e-6;          // relative residual target of every update equation
  Index n_min = 64;           // blocks up to this size go to the dense base case
  Index n_min_inner = 0;      // n_min for nested Kronecker-sum solves (0: same as n_min)
  double inner_eps = 0.0;     // tolerance of nested solves (0: same as eps)
  Backend backend = Backend::fadi;
  ShiftPolicy shift_policy = ShiftPolicy::a_priori;
  int fixed_shifts = 8;
  double recompress_tol = -1.0;  // relative truncation of update solutions (negative: residual-based)
  double rhs_tol = 1e-14;        // truncation of update right-hand sides
  int ek_max_iter = 60;
  bool parallel = false;
  bool balanced_only = false;  // split every splittable mode (balanced recursion)
  int max_depth = 64;

  void validate() const;
};

struct UpdateRecord {
  int depth = 0;
  int mode = -1;  // -1 for the combined two-mode update
  Index rhs_rank = 0;
  Index solution_rank = 0;
  int shifts = 0;
  bool nested = false;  // issued inside a nested Kronecker-sum solve
};

struct SplitRecord {
  int depth = 0;
  unsigned mask = 0;  // bit t set when mode t was split
  bool nested = false;
};

struct SolveStats {
  double time_total = 0.0;
  double time_dense = 0.0;    // base-case diagonalization solves
  double time_lowrank = 0.0;  // fADI / RK / EK excluding nested recursion work
  double time_rhs = 0.0;      // update right-hand sides and assembly
  double time_spectra = 0.0;
  long dense_solves = 0;
  std::vector<UpdateRecord> updates;
  std::vector<SplitRecord> splits;
  std::vector<std::string> warnings;

  Index max_update_rank() const;
  int max_shifts() const;
  int outer_updates() const;
};

// Solves sum_t X x_t A_t = B by nested divide and conquer. One solver object
// owns the spectra cache and the statistics; solve() may be called repeatedly.
class DncSolver {
 public:
  explicit DncSolver(SolverConfig cfg, std::shared_ptr<SpectraCache> cache = nullptr);
  ~DncSolver();
  DncSolver(const DncSolver&) = delete;
  DncSolver& operator=(const DncSolver&) = delete;

  Tensor solve(const std::vector<Coefficient>& coeffs, const Tensor& B);
  Tensor solve(const std::vector<HMatrix>& coeffs, const Tensor& B);

  // (sum of the Kronecker sum + sigma I) x = b for every column of rhs.
  Matrix nested_shifted_solve(const std::vector<Coefficient>& coeffs, double sigma,
                              const Matrix& rhs);

  const SolverConfig& config() const noexcept;
  SolveStats stats() const;
  void reset_stats();
  SpectraCache& spectra();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// Dense base case: diagonalize every coefficient, divide by eigenvalue sums.
Tensor lyapnd_diag(const std::vector<Matrix>& coeffs, const Tensor& B);
Tensor lyapnd_diag(const std::vector<Coefficient>& coeffs, const Tensor& B);

Tensor lyap2d_dnc_balanced(const HMatrix& A1, const HMatrix& A2, const Tensor& B,
                           SolverConfig cfg, SolveStats* stats = nullptr);
Tensor lyap2d_dnc(const HMatrix& A1, const HMatrix& A2, const Tensor& B, const SolverConfig& cfg,
                  SolveStats* stats = nullptr);
Tensor lyapnd_dnc(const std::vector<HMatrix>& coeffs, const Tensor& B, const SolverConfig& cfg,
                  SolveStats* stats = nullptr);
Matrix nested_shifted_solve(const std::vector<HMatrix>& coeffs, double sigma, const Matrix& rhs,
                            const SolverConfig& cfg);

// Right-hand side of the update for mode j: U from A_j^off = U Vt^T and
// V = -matricize(X1 x_j Vt^T, j)^T, recompressed with V orthonormal.
LowRank update_rhs_assembly(const Tensor& X1, const HMatrix& H, int j, double tol = 1e-14);

// Interval pair, shift count and shifts for one update equation.
struct PlannedUpdate {
  int depth = 0;
  int mode = -1;
  IntervalPair pair{};
  ShiftSet shifts;
};
ShiftSet plan_shifts(const IntervalPair& pair, const SolverConfig& cfg);
// Walks the outer recursion without solving and lists every update equation.
std::vector<PlannedUpdate> level_shift_plan(const std::vector<HMatrix>& coeffs,
                                            const SolverConfig& cfg, SpectraCache& cache);

}  // namespace teq
