#include "teq/dnc.hpp"

#include "teq/error.hpp"
#include "teq/lowrank_sylvester.hpp"
#include "teq/parallel.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>

namespace teq {

const char* to_string(Backend b) {
  switch (b) {
    case Backend::fadi: return "fadi";
    case Backend::rk: return "rk";
    case Backend::ek: return "ek";
  }
  return "?";
}

Backend backend_from_string(const std::string& s) {
  if (s == "fadi" || s == "adi") return Backend::fadi;
  if (s == "rk") return Backend::rk;
  if (s == "ek") return Backend::ek;
  throw ConfigError("unknown backend '" + s + "' (expected fadi, rk or ek)");
}

void SolverConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (n_min < 2) throw ConfigError("n_min must be at least 2");
  if (n_min_inner != 0 && n_min_inner < 2) throw ConfigError("n_min_inner must be 0 or >= 2");
  if (inner_eps < 0.0 || inner_eps >= 1.0) throw ConfigError("inner_eps must be 0 or in (0, 1)");
  if (shift_policy == ShiftPolicy::fixed_count && fixed_shifts < 1)
    throw ConfigError("fixed shift count must be positive");
}

Index SolveStats::max_update_rank() const {
  Index r = 0;
  for (const auto& u : updates) r = std::max(r, u.solution_rank);
  return r;
}

int SolveStats::max_shifts() const {
  int s = 0;
  for (const auto& u : updates) s = std::max(s, u.shifts);
  return s;
}

int SolveStats::outer_updates() const {
  return static_cast<int>(std::count_if(updates.begin(), updates.end(),
                                        [](const UpdateRecord& u) { return !u.nested; }));
}

ShiftSet plan_shifts(const IntervalPair& pair, const SolverConfig& cfg, double eps) {
  int s = cfg.fixed_shifts;
  if (cfg.shift_policy == ShiftPolicy::a_priori)
    s = cfg.backend == Backend::rk ? shift_count_rk(eps, pair) : shift_count_adi(eps, pair);
  return zolotarev_shifts(s, pair);
}

ShiftSet plan_shifts(const IntervalPair& pair, const SolverConfig& cfg) {
  return plan_shifts(pair, cfg, cfg.eps);
}

LowRank update_rhs_assembly(const Tensor& X1, const HMatrix& H, int j, double tol) {
  if (H.size() != X1.dim(j)) throw DimensionError("update_rhs_assembly: mode size mismatch");
  const Index cols = X1.size() / X1.dim(j);
  const LowRank F = H.top_offdiag_factor();
  if (F.rank() == 0) return LowRank::zero(H.size(), cols);
  const Tensor Y = mode_product(X1, j, F.V.transpose());
  const LowRank L(F.U, -matricize(Y, j).transpose());
  return recompress(L, tol);
}

namespace {

using Clock = std::chrono::steady_clock;

enum Phase { kDense = 0, kLowrank, kRhs, kSpectra };

// X += tensorize(U V^T, t) without forming the dense correction.
void add_lowrank(Tensor& X, int t, const LowRank& L) {
  const Index n = X.dim(t), left = left_size(X.dims(), t), right = right_size(X.dims(), t);
  if (left == 1) {
    X.reshaped(n, right).noalias() += L.U * L.V.transpose();
    return;
  }
  for (Index r = 0; r < right; ++r) {
    Eigen::Map<Matrix> slab(X.data() + r * left * n, left, n);
    slab.noalias() += L.V.middleRows(r * left, left) * L.U.transpose();
  }
}

unsigned choose_splits(const std::vector<Coefficient>& co, Index nmin, bool balanced_only) {
  Index maxn = 0;
  for (const auto& c : co) maxn = std::max(maxn, c.size());
  unsigned mask = 0;
  for (std::size_t t = 0; t < co.size(); ++t) {
    const Index n = co[t].size();
    const bool splittable = !co[t].H.is_leaf() && n > nmin;
    if (splittable && (balanced_only || 2 * n >= maxn)) mask |= 1u << t;
  }
  return mask;
}

// Ranges for the subproblem selected by `pick` (bit i: upper half of the i-th split mode).
std::vector<IndexRange> sub_ranges(const std::vector<Coefficient>& co, const Dims& dims,
                                   unsigned mask, unsigned pick) {
  std::vector<IndexRange> r(dims.size());
  int bit = 0;
  for (std::size_t t = 0; t < dims.size(); ++t) {
    r[t] = {0, dims[t]};
    if (t < co.size() && (mask >> t & 1u)) {
      const Index n0 = co[t].H.child(0).size();
      r[t] = (pick >> bit & 1u) ? IndexRange{n0, dims[t] - n0} : IndexRange{0, n0};
      ++bit;
    }
  }
  return r;
}

std::vector<Coefficient> sub_coeffs(const std::vector<Coefficient>& co, unsigned mask,
                                    unsigned pick) {
  std::vector<Coefficient> out = co;
  int bit = 0;
  for (std::size_t t = 0; t < co.size(); ++t) {
    if (mask >> t & 1u) {
      out[t].H = co[t].H.child((pick >> bit) & 1u);
      ++bit;
    }
  }
  return out;
}

}  // namespace

struct DncSolver::Impl {
  SolverConfig cfg;
  std::shared_ptr<SpectraCache> cache;
  mutable std::mutex mu;
  SolveStats stats;

  struct Frame {
    Impl* owner;
    int kind;
    Clock::time_point start;
  };
  static thread_local std::vector<Frame> frames;

  // Exclusive phase timer: entering a phase pauses the enclosing one.
  class Scope {
   public:
    Scope(Impl& im, int kind) {
      const auto now = Clock::now();
      if (!frames.empty()) flush(frames.back(), now);
      frames.push_back({&im, kind, now});
    }
    ~Scope() {
      const auto now = Clock::now();
      flush(frames.back(), now);
      frames.pop_back();
      if (!frames.empty()) frames.back().start = now;
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    static void flush(Frame& f, Clock::time_point now) {
      f.owner->add_time(f.kind, std::chrono::duration<double>(now - f.start).count());
      f.start = now;
    }
  };

  void add_time(int kind, double sec) {
    std::lock_guard lock(mu);
    switch (kind) {
      case kDense: stats.time_dense += sec; break;
      case kLowrank: stats.time_lowrank += sec; break;
      case kRhs: stats.time_rhs += sec; break;
      case kSpectra: stats.time_spectra += sec; break;
    }
  }

  void warn(const std::string& w) {
    std::lock_guard lock(mu);
    if (std::find(stats.warnings.begin(), stats.warnings.end(), w) == stats.warnings.end())
      stats.warnings.push_back(w);
  }

  double eps(bool nested) const { return nested && cfg.inner_eps > 0.0 ? cfg.inner_eps : cfg.eps; }
  Index nmin(bool nested) const { return nested && cfg.n_min_inner > 0 ? cfg.n_min_inner : cfg.n_min; }
  bool parallel() const { return cfg.parallel && thread_budget() > 1; }

  SpectralInterval interval(const Coefficient& c) {
    if (auto hit = cache->find(c.H.id())) return hit->shifted(c.shift);
    Scope sc(*this, kSpectra);
    warn("spectral interval computed on demand for a block missing from the cache");
    return cache->interval(c.H).shifted(c.shift);
  }

  Tensor rec(const std::vector<Coefficient>& co, const Tensor& B, int depth, bool nested);
  LowRank update(const std::vector<Coefficient>& co, const Tensor& X1, int j, int depth, bool nested);
  LowRank update_combined(const std::vector<Coefficient>& co, const Tensor& X1, int depth, bool nested);
  LowRank lowrank_solve(const SymmetricOperator& A1, const SymmetricOperator& A2, const LowRank& rhs,
                        const IntervalPair& pair, bool nested, UpdateRecord& rec);
  Matrix kron_solve(std::vector<Coefficient> co, Index batch, double sigma, const Matrix& B);
};

thread_local std::vector<DncSolver::Impl::Frame> DncSolver::Impl::frames;

namespace {

// Kronecker sum of the coefficients acting on vectors shaped as the coefficient
// modes followed by a batch mode.
class KronSumOperator final : public SymmetricOperator {
 public:
  KronSumOperator(DncSolver::Impl& impl, std::vector<Coefficient> co, Index batch)
      : impl_(impl), co_(std::move(co)), batch_(batch) {
    n_ = batch_;
    for (const auto& c : co_) n_ *= c.size();
  }
  Index size() const override { return n_; }

  Matrix apply(const Matrix& X) const override {
    Dims dims;
    for (const auto& c : co_) dims.push_back(c.size());
    dims.push_back(batch_ * X.cols());
    const Tensor T(dims, std::vector<double>(X.data(), X.data() + X.size()));
    Tensor Y(dims);
    for (std::size_t t = 0; t < co_.size(); ++t) {
      const Coefficient& c = co_[t];
      Y += mode_apply(T, static_cast<int>(t), [&c](const Matrix& M) {
        Matrix R = c.H.matvec(M);
        if (c.shift != 0.0) R += c.shift * M;
        return R;
      });
    }
    return Y.reshaped(X.rows(), X.cols());
  }

  Matrix shifted_solve(double sigma, const Matrix& B) const override {
    return impl_.kron_solve(co_, batch_, sigma, B);
  }

 private:
  DncSolver::Impl& impl_;
  std::vector<Coefficient> co_;
  Index batch_;
  Index n_;
};

}  // namespace

Matrix DncSolver::Impl::kron_solve(std::vector<Coefficient> co, Index batch, double sigma,
                                   const Matrix& B) {
  if (co.size() == 1) return HMatrixOperator(co[0].H, co[0].shift, batch).shifted_solve(sigma, B);
  // Fold sigma into the coefficient with the largest lower spectral bound.
  std::size_t best = 0;
  double best_alpha = -INFINITY;
  for (std::size_t t = 0; t < co.size(); ++t) {
    const double a = interval(co[t]).alpha;
    if (a > best_alpha) {
      best_alpha = a;
      best = t;
    }
  }
  co[best].shift += sigma;
  Dims dims;
  for (const auto& c : co) dims.push_back(c.size());
  dims.push_back(batch * B.cols());
  const Tensor T(dims, std::vector<double>(B.data(), B.data() + B.size()));
  const Tensor X = rec(co, T, 0, true);
  return X.reshaped(B.rows(), B.cols());
}

LowRank DncSolver::Impl::lowrank_solve(const SymmetricOperator& A1, const SymmetricOperator& A2,
                                       const LowRank& rhs, const IntervalPair& pair, bool nested,
                                       UpdateRecord& rec) {
  const double e = eps(nested);
  LowRankSolveOptions opt;
  opt.recompress_tol = cfg.recompress_tol;
  opt.orthonormalize_rhs = false;  // recompress() already made V orthonormal
  opt.parallel = parallel();
  LowRank X;
  if (cfg.backend == Backend::ek) {
    EkResult r = ek_solve(A1, A2, rhs, e, cfg.ek_max_iter, opt);
    if (!r.converged) warn("extended Krylov stopped before reaching the update tolerance");
    rec.shifts = r.iterations;
    X = std::move(r.X);
  } else {
    const ShiftSet sh = plan_shifts(pair, cfg, e);
    rec.shifts = sh.s;
    X = cfg.backend == Backend::rk ? rk_solve(A1, A2, rhs, sh, opt) : fadi(A1, A2, rhs, sh, opt);
  }
  if (cfg.recompress_tol >= 0.0) return X;
  // A factor wider than the short side carries no low-rank structure; fold it
  // exactly instead of paying for an SVD of the tall side.
  if (X.rank() >= std::min(X.rows(), X.cols())) {
    if (X.rows() <= X.cols()) {
      const ThinQR q = thin_qr(X.U);
      return LowRank(q.Q, X.V * q.R.transpose());
    }
    const ThinQR q = thin_qr(X.V);
    return LowRank(X.U * q.R.transpose(), q.Q);
  }
  // Truncating dX by tau perturbs the update residual by at most (b1 + b2) tau, so
  // the budget is taken relative to the right-hand side rather than to dX, whose
  // norm can exceed ||rhs|| by the conditioning of the operator.
  return recompress_absolute(X, (e / 10.0) * rhs.norm() / (pair.b1 + pair.b2));
}

LowRank DncSolver::Impl::update(const std::vector<Coefficient>& co, const Tensor& X1, int j,
                               int depth, bool nested) {
  UpdateRecord rec;
  rec.depth = depth;
  rec.mode = j;
  rec.nested = nested;
  LowRank rhs;
  {
    Scope sc(*this, kRhs);
    rhs = update_rhs_assembly(X1, co[j].H, j, cfg.rhs_tol);
  }
  rec.rhs_rank = rhs.rank();
  if (rhs.rank() == 0) return rhs;

  std::vector<Coefficient> others;
  for (std::size_t t = 0; t < co.size(); ++t)
    if (static_cast<int>(t) != j) others.push_back(co[t]);
  Index batch = X1.size() / X1.dim(j);
  for (const auto& c : others) batch /= c.size();

  const SpectralInterval e = interval(co[j]);
  IntervalPair pair{e.alpha, e.beta, 0.0, 0.0};
  for (const auto& c : others) {
    const SpectralInterval f = interval(c);
    pair.a2 += f.alpha;
    pair.b2 += f.beta;
  }

  LowRank dX;
  {
    Scope sc(*this, kLowrank);
    const HMatrixOperator A1(co[j].H, co[j].shift);
    const KronSumOperator A2(*this, others, batch);
    dX = lowrank_solve(A1, A2, rhs, pair, nested, rec);
  }
  rec.solution_rank = dX.rank();
  {
    std::lock_guard lock(mu);
    stats.updates.push_back(rec);
  }
  return dX;
}

LowRank DncSolver::Impl::update_combined(const std::vector<Coefficient>& co, const Tensor& X1,
                                        int depth, bool nested) {
  UpdateRecord rec;
  rec.depth = depth;
  rec.nested = nested;
  LowRank rhs;
  {
    Scope sc(*this, kRhs);
    // -A1^off X1 - X1 A2^off = [Z1a, X1 Z1b] [-X1^T Z2a, -Z2b]^T
    const LowRank fa = co[0].H.top_offdiag_factor(), fb = co[1].H.top_offdiag_factor();
    const auto X = X1.reshaped(X1.dim(0), X1.dim(1));
    Matrix U(X.rows(), fa.rank() + fb.rank()), V(X.cols(), fa.rank() + fb.rank());
    U << fa.U, X * fb.U;
    V << -(X.transpose() * fa.V), -fb.V;
    rhs = recompress(LowRank(std::move(U), std::move(V)), cfg.rhs_tol);
  }
  rec.rhs_rank = rhs.rank();
  if (rhs.rank() == 0) return rhs;
  const SpectralInterval e = interval(co[0]), f = interval(co[1]);
  const IntervalPair pair{e.alpha, e.beta, f.alpha, f.beta};
  LowRank dX;
  {
    Scope sc(*this, kLowrank);
    const HMatrixOperator A1(co[0].H, co[0].shift), A2(co[1].H, co[1].shift);
    dX = lowrank_solve(A1, A2, rhs, pair, nested, rec);
  }
  rec.solution_rank = dX.rank();
  {
    std::lock_guard lock(mu);
    stats.updates.push_back(rec);
  }
  return dX;
}

Tensor DncSolver::Impl::rec(const std::vector<Coefficient>& co, const Tensor& B, int depth,
                            bool nested) {
  if (depth > cfg.max_depth) throw SolverError(depth, "recursion depth limit exceeded");
  const int d = static_cast<int>(co.size());
  const bool batched = B.order() > d;
  const unsigned mask = choose_splits(co, nmin(nested), cfg.balanced_only);
  if (mask == 0) {
    Scope sc(*this, kDense);
    {
      std::lock_guard lock(mu);
      ++stats.dense_solves;
    }
    return lyapnd_diag(co, B);
  }
  {
    std::lock_guard lock(mu);
    stats.splits.push_back({depth, mask, nested});
  }
  const int r = std::popcount(mask);
  const unsigned count = 1u << r;
  std::vector<Tensor> parts(count);
  std::vector<std::function<void()>> tasks;
  for (unsigned pick = 0; pick < count; ++pick) {
    tasks.emplace_back([&, pick] {
      const auto ranges = sub_ranges(co, B.dims(), mask, pick);
      Tensor sub;
      {
        Scope sc(*this, kRhs);
        sub = block_view(B, ranges);
      }
      parts[pick] = rec(sub_coeffs(co, mask, pick), sub, depth + 1, nested);
    });
  }
  parallel_run(parallel(), tasks);
  Tensor X1(B.dims());
  {
    Scope sc(*this, kRhs);
    for (unsigned pick = 0; pick < count; ++pick)
      block_write(X1, sub_ranges(co, B.dims(), mask, pick), parts[pick]);
  }
  parts.clear();

  // The combined 2D correction is the mode-0 unfolding of the update.
  std::vector<int> modes;
  std::vector<LowRank> corr;
  if (d == 2 && !batched && mask == 3u) {
    modes.push_back(0);
    corr.push_back(update_combined(co, X1, depth, nested));
  } else {
    for (int t = 0; t < d; ++t)
      if (mask >> t & 1u) modes.push_back(t);
    corr.resize(modes.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < modes.size(); ++i)
      jobs.emplace_back([&, i] { corr[i] = update(co, X1, modes[i], depth, nested); });
    parallel_run(parallel(), jobs);
  }
  Scope sc(*this, kRhs);
  for (std::size_t i = 0; i < corr.size(); ++i)
    if (corr[i].rank() > 0) add_lowrank(X1, modes[i], corr[i]);
  return X1;
}

DncSolver::DncSolver(SolverConfig cfg, std::shared_ptr<SpectraCache> cache)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  impl_->cfg = cfg;
  impl_->cache = cache ? std::move(cache) : std::make_shared<SpectraCache>();
}

DncSolver::~DncSolver() = default;

const SolverConfig& DncSolver::config() const noexcept { return impl_->cfg; }

SolveStats DncSolver::stats() const {
  std::lock_guard lock(impl_->mu);
  return impl_->stats;
}

void DncSolver::reset_stats() {
  std::lock_guard lock(impl_->mu);
  impl_->stats = SolveStats{};
}

SpectraCache& DncSolver::spectra() { return *impl_->cache; }

Tensor DncSolver::solve(const std::vector<HMatrix>& coeffs, const Tensor& B) {
  std::vector<Coefficient> co;
  for (const auto& H : coeffs) co.push_back({H, 0.0});
  return solve(co, B);
}

Tensor DncSolver::solve(const std::vector<Coefficient>& coeffs_in, const Tensor& B) {
  const auto t0 = Clock::now();
  Impl& im = *impl_;
  if (coeffs_in.empty()) throw DimensionError("solve needs at least one coefficient");
  if (static_cast<int>(coeffs_in.size()) != B.order())
    throw DimensionError("solve: " + std::to_string(coeffs_in.size()) +
                         " coefficients for a tensor of order " + std::to_string(B.order()));
  for (std::size_t t = 0; t < coeffs_in.size(); ++t)
    if (coeffs_in[t].size() != B.dim(static_cast<int>(t)))
      throw DimensionError("solve: coefficient " + std::to_string(t) + " has size " +
                           std::to_string(coeffs_in[t].size()) + ", mode has " +
                           std::to_string(B.dim(static_cast<int>(t))));
  {
    Impl::Scope sc(im, kSpectra);
    for (const auto& c : coeffs_in) estimate_spectra(c.H, *im.cache);
  }
  for (const auto& c : coeffs_in)
    if (c.H.compression_warning())
      im.warn("off-diagonal compression hit the rank cap before reaching its tolerance");

  // Squeeze size-1 modes into a shift of the best conditioned remaining mode.
  std::vector<Coefficient> co;
  Dims dims;
  double folded = 0.0;
  for (const auto& c : coeffs_in) {
    if (c.size() == 1) {
      folded += c.H.dense()(0, 0) + c.shift;
    } else {
      co.push_back(c);
      dims.push_back(c.size());
    }
  }
  Tensor X;
  if (co.empty()) {
    if (!(folded > 0.0)) throw StructureError("scalar Kronecker sum is not positive");
    X = B;
    X *= 1.0 / folded;
  } else {
    if (folded != 0.0) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < co.size(); ++t)
        if (im.interval(co[t]).alpha > im.interval(co[best]).alpha) best = t;
      co[best].shift += folded;
    }
    double sa = 0.0, sb = 0.0;
    int ell = 0;
    for (const auto& c : co) {
      const SpectralInterval iv = im.interval(c);
      sa += iv.alpha;
      sb += iv.beta;
      ell = std::max(ell, c.H.depth());
    }
    const double kappa = sb / sa;
    if (kappa * im.cfg.eps >= 1.0)
      im.warn("kappa * eps >= 1: the update residual bounds are not guaranteed");
    else if (ell > 0 && kappa * im.cfg.eps >= 2.0 / ell)
      im.warn("kappa * eps >= 2 / depth: the accumulated residual bound is not guaranteed");
    const Tensor Bs(dims, B.values());
    if (co.size() == 1) {
      const Matrix sol = co[0].H.shifted_solve(co[0].shift, Bs.reshaped(dims[0], 1));
      X = Tensor(B.dims(), std::vector<double>(sol.data(), sol.data() + sol.size()));
    } else {
      X = Tensor(B.dims(), im.rec(co, Bs, 0, false).values());
    }
  }
  std::lock_guard lock(im.mu);
  im.stats.time_total += std::chrono::duration<double>(Clock::now() - t0).count();
  return X;
}

Matrix DncSolver::nested_shifted_solve(const std::vector<Coefficient>& coeffs, double sigma,
                                       const Matrix& rhs) {
  const auto t0 = Clock::now();
  Impl& im = *impl_;
  Index N = 1;
  for (const auto& c : coeffs) N *= c.size();
  if (rhs.rows() != N) throw DimensionError("nested_shifted_solve: rhs row count mismatch");
  {
    Impl::Scope sc(im, kSpectra);
    for (const auto& c : coeffs) estimate_spectra(c.H, *im.cache);
  }
  Matrix X = im.kron_solve(coeffs, 1, sigma, rhs);
  std::lock_guard lock(im.mu);
  im.stats.time_total += std::chrono::duration<double>(Clock::now() - t0).count();
  return X;
}

Tensor lyapnd_dnc(const std::vector<HMatrix>& coeffs, const Tensor& B, const SolverConfig& cfg,
                  SolveStats* stats) {
  DncSolver solver(cfg);
  Tensor X = solver.solve(coeffs, B);
  if (stats) *stats = solver.stats();
  return X;
}

Tensor lyap2d_dnc(const HMatrix& A1, const HMatrix& A2, const Tensor& B, const SolverConfig& cfg,
                  SolveStats* stats) {
  if (B.order() != 2) throw DimensionError("lyap2d_dnc needs an order-2 right-hand side");
  return lyapnd_dnc({A1, A2}, B, cfg, stats);
}

Tensor lyap2d_dnc_balanced(const HMatrix& A1, const HMatrix& A2, const Tensor& B,
                           SolverConfig cfg, SolveStats* stats) {
  cfg.balanced_only = true;
  return lyap2d_dnc(A1, A2, B, cfg, stats);
}

Matrix nested_shifted_solve(const std::vector<HMatrix>& coeffs, double sigma, const Matrix& rhs,
                            const SolverConfig& cfg) {
  std::vector<Coefficient> co;
  for (const auto& H : coeffs) co.push_back({H, 0.0});
  DncSolver solver(cfg);
  return solver.nested_shifted_solve(co, sigma, rhs);
}

namespace {

void plan_rec(const std::vector<Coefficient>& co, const SolverConfig& cfg, SpectraCache& cache,
              int depth, std::vector<PlannedUpdate>& out) {
  const unsigned mask = choose_splits(co, cfg.n_min, cfg.balanced_only);
  if (mask == 0) return;
  auto iv = [&](const Coefficient& c) { return cache.interval(c.H).shifted(c.shift); };
  const int d = static_cast<int>(co.size());
  if (d == 2 && mask == 3u) {
    const SpectralInterval e = iv(co[0]), f = iv(co[1]);
    const IntervalPair pair{e.alpha, e.beta, f.alpha, f.beta};
    out.push_back({depth, -1, pair, plan_shifts(pair, cfg)});
  } else {
    for (int j = 0; j < d; ++j) {
      if (!(mask >> j & 1u)) continue;
      const SpectralInterval e = iv(co[j]);
      IntervalPair pair{e.alpha, e.beta, 0.0, 0.0};
      for (int t = 0; t < d; ++t) {
        if (t == j) continue;
        const SpectralInterval f = iv(co[t]);
        pair.a2 += f.alpha;
        pair.b2 += f.beta;
      }
      out.push_back({depth, j, pair, plan_shifts(pair, cfg)});
    }
  }
  const unsigned count = 1u << std::popcount(mask);
  for (unsigned pick = 0; pick < count; ++pick)
    plan_rec(sub_coeffs(co, mask, pick), cfg, cache, depth + 1, out);
}

}  // namespace

std::vector<PlannedUpdate> level_shift_plan(const std::vector<HMatrix>& coeffs,
                                            const SolverConfig& cfg, SpectraCache& cache) {
  cfg.validate();
  std::vector<Coefficient> co;
  for (const auto& H : coeffs) {
    estimate_spectra(H, cache);
    co.push_back({H, 0.0});
  }
  std::vector<PlannedUpdate> out;
  plan_rec(co, cfg, cache, 0, out);
  return out;
}

}  // namespace teq
