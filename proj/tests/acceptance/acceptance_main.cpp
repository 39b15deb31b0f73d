// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include "oracles.hpp"
#include "teq/cli.hpp"
#include "teq/dnc.hpp"
#include "teq/generators.hpp"
#include "teq/lowrank_sylvester.hpp"
#include "teq/parallel.hpp"
#include "teq/zolotarev.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace teq;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Matrix randn(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix A(m, n);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
  return A;
}

// Solution of sum_t X x_t A_t = B by diagonalizing every A_t independently of
// the library's base case.
Tensor diagonalization_solve(const std::vector<Matrix>& A, const Tensor& B) {
  const int d = static_cast<int>(A.size());
  std::vector<Matrix> Q(d);
  std::vector<Vector> lam(d);
  for (int t = 0; t < d; ++t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A[t]);
    Q[t] = es.eigenvectors();
    lam[t] = es.eigenvalues();
  }
  // Mode-t product by an explicit slab loop.
  auto apply = [&](const Tensor& X, int t, const Matrix& M) {
    const Dims& dims = X.dims();
    Index left = 1, right = 1;
    for (int u = 0; u < t; ++u) left *= dims[u];
    for (int u = t + 1; u < d; ++u) right *= dims[u];
    const Index n = dims[t];
    Tensor Y(dims);
    for (Index r = 0; r < right; ++r)
      for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k) {
          const double m = M(i, k);
          const double* src = X.data() + (r * n + k) * left;
          double* dst = Y.data() + (r * n + i) * left;
          for (Index l = 0; l < left; ++l) dst[l] += m * src[l];
        }
    return Y;
  };
  Tensor Y = B;
  for (int t = 0; t < d; ++t) Y = apply(Y, t, Q[t].transpose());
  std::vector<Index> idx(d, 0);
  for (Index lin = 0; lin < Y.size(); ++lin) {
    Index rem = lin;
    double s = 0.0;
    for (int t = 0; t < d; ++t) {
      s += lam[t](rem % Y.dim(t));
      rem /= Y.dim(t);
    }
    Y.data()[lin] /= s;
  }
  for (int t = 0; t < d; ++t) Y = apply(Y, t, Q[t]);
  return Y;
}

// ||sum_t X x_t A_t - B||_F with dense coefficients and explicit slab products.
double dense_residual(const std::vector<Matrix>& A, const Tensor& X, const Tensor& B) {
  const int d = X.order();
  Tensor R = B;
  R *= -1.0;
  for (int t = 0; t < d; ++t) {
    Index left = 1, right = 1;
    for (int u = 0; u < t; ++u) left *= X.dim(u);
    for (int u = t + 1; u < d; ++u) right *= X.dim(u);
    const Index n = X.dim(t);
    for (Index r = 0; r < right; ++r) {
      Eigen::Map<const Matrix> xs(X.data() + r * n * left, left, n);
      Eigen::Map<Matrix> rs(R.data() + r * n * left, left, n);
      rs.noalias() += xs * A[t].transpose();
    }
  }
  return R.norm();
}

double kappa_of(const std::vector<Matrix>& A) {
  double a = 0.0, b = 0.0;
  for (const auto& M : A) {
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(M).eigenvalues();
    a += ev.minCoeff();
    b += ev.maxCoeff();
  }
  return b / a;
}

// Random SPD coefficient: diagonally dominant banded, or compressed Q D^p Q^T.
HMatrix random_coefficient(Index n, Index n_min, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 1);
  if (kind(rng) == 0) {
    std::uniform_int_distribution<int> bw_dist(1, 3);
    const Index bw = std::min<Index>(bw_dist(rng), n - 1);
    std::uniform_real_distribution<double> off(-1.0, 1.0);
    BandedMatrix A(n, bw);
    for (Index i = 0; i < n; ++i)
      for (Index k = 1; k <= bw && i + k < n; ++k) A.set(i + k, i, off(rng));
    for (Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Index j = std::max<Index>(0, i - bw); j <= std::min(n - 1, i + bw); ++j)
        if (j != i) row += std::abs(A(i, j));
      A.set(i, i, row + 0.05 + std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    }
    return HMatrix::from_banded(A, n_min);
  }
  std::uniform_real_distribution<double> power(1.0, 1.3);
  std::uniform_int_distribution<int> band(1, 4);
  const RandomSpd R = gen_random_spd_hss(n, power(rng), band(rng), rng());
  return HMatrix::from_dense(R.A, ClusterTree::build(n, n_min), 1e-14);
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2024);
  double worst_err = 0.0, worst_res_ratio = 0.0;
  int brute = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int d = inst < 25 ? 2 : 3;
    std::uniform_int_distribution<Index> size(d == 2 ? 16 : 4, d == 2 ? 128 : 16);
    const Index n_min = d == 2 ? 16 : 4;
    std::vector<HMatrix> H;
    std::vector<Matrix> A;
    Dims dims;
    for (int t = 0; t < d; ++t) {
      H.push_back(random_coefficient(size(rng), n_min, rng));
      A.push_back(H.back().dense());
      dims.push_back(H.back().size());
    }
    const Tensor B = Tensor::random(dims, rng());
    SolverConfig cfg;
    cfg.eps = 1e-8;
    cfg.n_min = n_min;
    const Tensor X = d == 2 ? lyap2d_dnc(H[0], H[1], B, cfg) : lyapnd_dnc(H, B, cfg);

    Tensor ref = diagonalization_solve(A, B);
    if (ref.size() <= 1728) {
      ++brute;
      const Vector v = oracle::kron_solve(A, B.vec());
      ref = Tensor(dims, std::vector<double>(v.data(), v.data() + v.size()));
    }
    const double err = (X.vec() - ref.vec()).norm() / ref.vec().norm();
    int ell = 0;
    for (const auto& h : H) ell = std::max(ell, h.depth());
    const double bound = (ell + 1) * (ell + 1) * kappa_of(A) * cfg.eps * B.norm();
    const double res = dense_residual(A, X, B);
    worst_err = std::max(worst_err, err);
    worst_res_ratio = std::max(worst_res_ratio, res / bound);
    if (err > 1e-5 || res > bound) o.pass = false;
  }
  o.detail = fmt("max rel err %.2e (<= 1e-5), max residual/bound %.2e (<= 1), %g brute-force",
                 worst_err, worst_res_ratio, brute);
  return o;
}

Outcome zolotarev_machinery() {
  Outcome o;
  const std::vector<IntervalPair> geoms{
      {1.0, 1e3, 1.0, 1e3}, {1.0, 50.0, 2.0, 400.0}, {1e-3, 1e3, 1e-3, 1e3}};
  double worst = 0.0;
  for (const auto& g : geoms)
    for (int s = 1; s <= 12; ++s) {
      const ShiftSet S = zolotarev_shifts(s, g);
      const double ratio = oracle::zolotarev_ratio(S.p, S.q, g.a1, g.b1, g.a2, g.b2);
      worst = std::max(worst, ratio / zolotarev_bound(s, g));
      for (double z : oracle::log_grid(g.a1, g.b1, 10000)) {
        double v = 1.0;
        for (int j = 0; j < s; ++j) v *= std::abs(z - S.p[j]) / std::abs(z - S.q[j]);
        if (v > 1.0) o.pass = false;
      }
    }
  if (worst > 1.0 + 1e-8) o.pass = false;
  o.detail = fmt("max grid ratio / bound %.3f (<= 1 + 1e-8), shift property ", worst) +
             (o.pass ? "holds" : "violated");
  return o;
}

Outcome fadi_correctness() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Index n = 64;
    const RandomSpd R1 = gen_random_spd_hss(n, 1.0, 3, seed), R2 = gen_random_spd_hss(n, 1.4, 2, seed + 10);
    const DenseOperator op1(R1.A), op2(R2.A);
    const IntervalPair pr{R1.D.minCoeff(), R1.D.maxCoeff(), R2.D.minCoeff(), R2.D.maxCoeff()};
    const LowRank rhs{randn(n, 3, seed + 20), randn(n, 3, seed + 30)};
    for (int s : {2, 5, 9}) {
      const ShiftSet S = zolotarev_shifts(s, pr);
      const LowRank X = fadi(op1, op2, rhs, S, {.recompress_tol = -1.0});
      const Matrix Xd = X.dense();
      const double measured = (R1.A * Xd + Xd * R2.A - rhs.dense()).norm();
      const double closed = fadi_residual_exact(R1.A, R2.A, rhs, S);
      worst = std::max(worst, std::abs(measured - closed) / closed);
    }
  }
  const Index n = 256;
  const HMatrix L = HMatrix::from_banded(gen_laplace1d(n), 32);
  const Vector ev = laplace1d_eigenvalues(n);
  const IntervalPair pr{ev.minCoeff(), ev.maxCoeff(), ev.minCoeff(), ev.maxCoeff()};
  const int s = shift_count_adi(1e-8, pr);
  const LowRank rhs{randn(n, 2, 7), randn(n, 2, 8)};
  const HMatrixOperator op(L);
  const LowRank X = fadi(op, op, rhs, zolotarev_shifts(s, pr), {.recompress_tol = -1.0});
  const Matrix Ld = L.dense(), Xd = X.dense(), C = rhs.dense();
  const double rel = (Ld * Xd + Xd * Ld - C).norm() / C.norm();
  o.pass = worst <= 1e-10 && rel <= 1e-8;
  o.detail = fmt("closed-form mismatch %.2e (<= 1e-10), Laplacian s=%g residual %.2e (<= 1e-8)",
                 worst, s, rel);
  return o;
}

Outcome inexact_fadi() {
  Outcome o;
  const Index n = 64;
  const Matrix A1 = gen_laplace1d(n).dense();
  const RandomSpd R = gen_random_spd_hss(n, 1.2, 2, 5);
  const DenseOperator op1(A1), op2(R.A);
  const IntervalPair pr{laplace1d_eigenvalues(n).minCoeff(), 4.0, R.D.minCoeff(), R.D.maxCoeff()};
  Eigen::SelfAdjointEigenSolver<Matrix> es(A1);
  double worst_res = 0.0, worst_m = 0.0;
  for (double eps : {1e-4, 1e-6})
    for (int s : {4, 8}) {
      const ShiftSet S = zolotarev_shifts(s, pr);
      const LowRank rhs{randn(n, 3, 11), randn(n, 3, 12)};
      InexactnessProbe probe;
      probe.eps_inject = eps;
      probe.seed = 3;
      const LowRank X = fadi_inexact(op1, op2, rhs, S, probe, {.recompress_tol = -1.0});
      const Matrix Xd = X.dense(), C = probe.rhs_used.dense();
      const double measured = (A1 * Xd + Xd * R.A - C).norm();
      const double exact = fadi_residual_exact(A1, R.A, probe.rhs_used, S);
      const double allowed = 2.0 * s * eps * probe.rhs_u_norm * probe.rhs_v_norm2;
      worst_res = std::max(worst_res, (measured - exact) / allowed);
      const Matrix& U = probe.rhs_used.U;
      for (int j = 1; j <= s; ++j) {
        Vector f(n);
        for (Index i = 0; i < n; ++i) f(i) = S.eval_prefix(es.eigenvalues()(i), j);
        const Matrix rU = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose() * U;
        const Matrix lhs = (A1 - S.p[j - 1] * Matrix::Identity(n, n)) * probe.W[j - 1];
        worst_m = std::max(worst_m, (lhs - rU).norm() / (j * eps * probe.rhs_u_norm));
      }
    }
  o.pass = worst_res <= 1.0 && worst_m <= 1.0 + 1e-6;
  o.detail = fmt("residual excess / allowance %.2e (<= 1), max ||M_j|| / (j eps ||U||) %.3f (<= 1)",
                 worst_res, worst_m);
  return o;
}

Outcome kappa_sweep() {
  Outcome o;
  cli::SweepOptions opt;
  opt.runs = 20;
  const auto rows = cli::accuracy_sweep(opt);
  double worst_ratio = 0.0, worst_m = 0.0, kmin = INFINITY, kmax = 0.0;
  for (const auto& r : rows) {
    kmin = std::min(kmin, r.kappa);
    kmax = std::max(kmax, r.kappa);
    if (r.kind == "general")
      worst_ratio = std::max(worst_ratio, r.residual / r.bound);
    else
      worst_m = std::max(worst_m, r.residual);
  }
  const double slope = cli::envelope_slope(rows, "general");
  o.pass = worst_ratio <= 1.0 && slope <= 0.6 && worst_m <= 1e-5;
  o.detail = fmt("kappa %.1e..%.1e, general residual/bound %.2e (<= 1), slope %.3f (<= 0.6)",
                 kmin, kmax, worst_ratio, slope) +
             fmt(", M-matrix max residual %.2e (<= 1e-5)", worst_m);
  return o;
}

Outcome laplace2d_residual() {
  const Index n = 1024;
  const HMatrix L = HMatrix::from_banded(gen_laplace1d(n), 256);
  const Tensor B = Tensor::random({n, n}, 5);
  SolverConfig cfg;
  cfg.eps = 1e-10;
  cfg.n_min = 256;
  const Tensor X = lyap2d_dnc(L, L, B, cfg);
  const Matrix Ld = L.dense();
  const double rel = dense_residual({Ld, Ld}, X, B) / B.norm();
  return {rel <= 1e-9, fmt("n=1024 relative residual %.2e (<= 1e-9)", rel)};
}

Outcome laplace3d_residual() {
  Outcome o;
  std::ostringstream ss;
  for (Index n : {64, 128}) {
    const HMatrix L = HMatrix::from_banded(gen_laplace1d(n), 16);
    const Tensor B = Tensor::random({n, n, n}, 9);
    SolverConfig cfg;
    cfg.eps = 1e-6;
    cfg.n_min = 16;
    const Tensor X = lyapnd_dnc({L, L, L}, B, cfg);
    const Matrix Ld = L.dense();
    const double rel = dense_residual({Ld, Ld, Ld}, X, B) / B.norm();
    if (rel > 1e-6) o.pass = false;
    ss << (n == 64 ? "" : ", ") << "n=" << n << " residual " << fmt("%.2e", rel);
  }
  o.detail = ss.str() + " (<= 1e-6)";
  return o;
}

// Best process CPU time of each solve over seven rounds. The sizes are
// interleaved within a round so slow periods on a shared machine hit all of
// them; the solves run on one thread, so CPU time tracks the work.
// Growth ratios t[i+1] / t[i] as the median over interleaved rounds. Sizes timed
// back to back see the same machine load, so the per-round ratio is far steadier
// than ratios of separately taken minima. Short solves are repeated so every
// measurement spans at least a quarter second of CPU time.
std::vector<double> growth_ratios(const std::vector<std::function<void()>>& solves,
                                  std::vector<double>& times) {
  auto cpu = [] { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; };
  std::vector<int> reps(solves.size(), 1);
  for (std::size_t i = 0; i < solves.size(); ++i) {
    const double c0 = cpu();
    solves[i]();
    reps[i] = std::max(1, static_cast<int>(std::ceil(0.25 / std::max(cpu() - c0, 1e-6))));
  }
  constexpr int rounds = 7;
  std::vector<std::vector<double>> ratios(solves.size() - 1);
  times.assign(solves.size(), INFINITY);
  for (int round = 0; round < rounds; ++round) {
    std::vector<double> t(solves.size());
    for (std::size_t i = 0; i < solves.size(); ++i) {
      const double c0 = cpu();
      for (int k = 0; k < reps[i]; ++k) solves[i]();
      t[i] = (cpu() - c0) / reps[i];
      times[i] = std::min(times[i], t[i]);
    }
    for (std::size_t i = 0; i + 1 < solves.size(); ++i) ratios[i].push_back(t[i + 1] / t[i]);
  }
  std::vector<double> out;
  for (auto& r : ratios) {
    std::nth_element(r.begin(), r.begin() + rounds / 2, r.end());
    out.push_back(r[rounds / 2]);
  }
  return out;
}

Outcome complexity_scaling() {
  Outcome o;
  set_thread_budget(1);
  std::vector<std::function<void()>> solves2, solves3;
  for (Index n : {512, 1024, 2048}) {
    SolverConfig cfg;
    cfg.eps = 1e-6;
    cfg.n_min = 256;
    const HMatrix L = HMatrix::from_banded(gen_laplace1d(n), cfg.n_min);
    solves2.push_back([L, cfg, B = Tensor::random({n, n}, 1)] { lyap2d_dnc(L, L, B, cfg); });
  }
  // Deep outer recursion with dense nested 2D solves keeps the run close to
  // the asymptotic regime.
  for (Index n : {32, 64, 128}) {
    SolverConfig cfg;
    cfg.eps = 1e-6;
    cfg.n_min = 2;
    cfg.n_min_inner = 1024;
    const HMatrix L = HMatrix::from_banded(gen_laplace1d(n), cfg.n_min);
    solves3.push_back([L, cfg, B = Tensor::random({n, n, n}, 1)] { lyapnd_dnc({L, L, L}, B, cfg); });
  }
  std::vector<double> t2, t3;
  const std::vector<double> g2 = growth_ratios(solves2, t2), g3 = growth_ratios(solves3, t3);
  const double r2a = g2[0], r2b = g2[1], r3a = g3[0], r3b = g3[1];
  o.pass = r2a <= 5.0 && r2b <= 5.0 && r3a <= 10.0 && r3b <= 10.0;
  o.detail = fmt("2D ratios %.2f %.2f (<= 5), ", r2a, r2b) +
             fmt("3D ratios %.2f %.2f (<= 10); ", r3a, r3b) +
             fmt("2D best times %.3g %.3g %.3g s, ", t2[0], t2[1], t2[2]) +
             fmt("3D best times %.3g %.3g %.3g s", t3[0], t3[1], t3[2]);
  return o;
}

HMatrix block_diagonal(Index n, Index n_min, std::uint64_t seed) {
  const Index h = (n + 1) / 2;
  Matrix A = Matrix::Zero(n, n);
  A.topLeftCorner(h, h) = gen_random_spd_hss(h, 1.0, 2, seed).A;
  A.bottomRightCorner(n - h, n - h) = gen_random_spd_hss(n - h, 1.3, 3, seed + 1).A;
  return HMatrix::from_dense(A, ClusterTree::build(n, n_min), 1e-15);
}

Outcome decoupling() {
  Outcome o;
  {
    const HMatrix A1 = block_diagonal(96, 8, 1), A2 = block_diagonal(64, 8, 3);
    const Tensor B = Tensor::random({96, 64}, 2);
    SolverConfig cfg;
    cfg.n_min = 8;
    const Tensor X = DncSolver(cfg).solve({A1, A2}, B);
    Tensor composed({96, 64});
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const std::vector<IndexRange> r{{a ? 48 : 0, 48}, {b ? 32 : 0, 32}};
        block_write(composed, r, DncSolver(cfg).solve({A1.child(a), A2.child(b)}, block_view(B, r)));
      }
    if (X.values() != composed.values()) o.pass = false;
  }
  {
    const HMatrix A = block_diagonal(24, 4, 5), Bm = block_diagonal(16, 4, 7), C = block_diagonal(20, 4, 9);
    const Tensor B = Tensor::random({24, 16, 20}, 4);
    SolverConfig cfg;
    cfg.n_min = 4;
    const Tensor X = DncSolver(cfg).solve({A, Bm, C}, B);
    Tensor composed({24, 16, 20});
    for (unsigned pick = 0; pick < 8; ++pick) {
      const int a = pick & 1, b = pick >> 1 & 1, c = pick >> 2 & 1;
      const std::vector<IndexRange> r{{12 * a, 12}, {8 * b, 8}, {10 * c, 10}};
      block_write(composed, r,
                  DncSolver(cfg).solve({A.child(a), Bm.child(b), C.child(c)}, block_view(B, r)));
    }
    if (X.values() != composed.values()) o.pass = false;
  }
  o.detail = o.pass ? "d=2 and d=3 outputs bit-identical" : "outputs differ";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit;  // seconds; 0 for no limit
  std::function<Outcome()> run;
};

}  // namespace

// Optional arguments select criteria by number, e.g. `teq_acceptance 5 8`.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> all{
      {1, "oracle equivalence", 120.0, oracle_equivalence},
      {2, "zolotarev machinery", 10.0, zolotarev_machinery},
      {3, "fADI correctness", 30.0, fadi_correctness},
      {4, "inexact fADI", 30.0, inexact_fadi},
      {5, "residual vs kappa sweep", 600.0, kappa_sweep},
      {6, "2D Laplace residual", 120.0, laplace2d_residual},
      {7, "3D Laplace residual", 300.0, laplace3d_residual},
      {8, "complexity scaling", 0.0, complexity_scaling},
      {9, "decoupling exactness", 10.0, decoupling},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    if (c.limit > 0.0 && t > c.limit) {
      o.pass = false;
      o.detail += fmt("; runtime over %.0f s", c.limit);
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s  %s  [%.1f s]\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), t);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
