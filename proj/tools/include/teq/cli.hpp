#pragma once

#include "teq/dnc.hpp"
#include "teq/generators.hpp"
#include "teq/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace teq::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kToleranceBreach = 2, kInvalidConfig = 3 };

struct ProblemOptions {
  int dim = 2;
  GeneratorSpec gen;  // gen.n is the size of mode 0
  Index n2 = 0;       // 0: same as n
  Index n3 = 0;
  std::uint64_t seed = 1;
  std::string rhs_path;  // tensor dump; random right-hand side when empty

  Dims dims() const;
};

struct Problem {
  std::vector<HMatrix> coeffs;
  Tensor B;
};

// Coefficient t is generated with seed + t so random kinds differ per mode.
Problem build_problem(const ProblemOptions& opt, Index n_min);

// Default recursion base size for a generator kind.
Index default_n_min(GeneratorKind kind);

// ||sum_t X x_t A_t - B||_F / ||B||_F using hierarchical matvecs only.
double relative_residual(const std::vector<HMatrix>& coeffs, const Tensor& X, const Tensor& B);

struct SweepOptions {
  Index n = 256;
  Index n_min = 32;
  double eps = 1e-6;
  int runs = 100;    // seeded instances per kappa point (general SPD case)
  int points = 10;   // powers p sampled uniformly in [p_min, p_max]
  double p_min = 1.0;
  double p_max = 2.15;
  Index band = 8;
  std::uint64_t seed = 1;
  bool general = true;
  bool mmatrix = true;
  Backend backend = Backend::fadi;
};

struct SweepRow {
  std::string kind;  // "general" or "mmatrix"
  int point = 0;
  double power = 1.0;
  double kappa = 1.0;
  std::uint64_t seed = 0;
  double residual = 0.0;      // relative
  double bound = 0.0;         // (l+1)^2 kappa eps
  double bound_sqrt = 0.0;    // (l+1)^2 sqrt(kappa) eps
  int depth = 0;
};

std::vector<SweepRow> accuracy_sweep(const SweepOptions& opt);

// Least-squares slope of log(max residual per kappa point) against log(kappa).
double envelope_slope(const std::vector<SweepRow>& rows, const std::string& kind);

// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teq::cli
