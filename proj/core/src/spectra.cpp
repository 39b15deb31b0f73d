#include "teq/spectra.hpp"

#include "teq/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace teq {

LanczosResult lanczos_extremal(const std::function<Vector(const Vector&)>& apply, Index n,
                               int steps, std::uint64_t seed) {
  LanczosResult res;
  const int k = static_cast<int>(std::min<Index>(steps, n));
  Matrix Q(n, k);
  std::vector<double> a, b;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector q(n);
  for (Index i = 0; i < n; ++i) q(i) = nd(rng);
  q.normalize();
  double scale = 0.0;
  for (int j = 0; j < k; ++j) {
    Q.col(j) = q;
    Vector w = apply(q);
    const double aj = q.dot(w);
    a.push_back(aj);
    scale = std::max(scale, std::abs(aj));
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    const double bj = w.norm();
    res.steps = j + 1;
    if (j + 1 == k) break;
    if (bj <= 1e-12 * std::max(scale, bj)) {
      res.breakdown = res.steps < n;
      break;
    }
    b.push_back(bj);
    q = w / bj;
  }
  const int m = res.steps;
  Matrix T = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) T(i, i) = a[i];
  for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = b[i];
  Eigen::SelfAdjointEigenSolver<Matrix> es(T, Eigen::EigenvaluesOnly);
  res.theta_min = es.eigenvalues()(0);
  res.theta_max = es.eigenvalues()(m - 1);
  return res;
}

SpectralInterval gershgorin(const Matrix& A) {
  double lo = INFINITY, hi = -INFINITY;
  for (Index i = 0; i < A.rows(); ++i) {
    const double r = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
    lo = std::min(lo, A(i, i) - r);
    hi = std::max(hi, A(i, i) + r);
  }
  return {lo, hi};
}

namespace {

std::uint64_t block_seed(const HMatrix& H) {
  // splitmix64 of the block position, so estimates do not depend on call order.
  std::uint64_t z = static_cast<std::uint64_t>(H.offset()) * 0x9E3779B97F4A7C15ULL +
                    static_cast<std::uint64_t>(H.size()) + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

SpectralInterval estimate_interval(const HMatrix& H, const SpectraOptions& opt) {
  const Index n = H.size();
  if (n <= opt.dense_below) {
    const Vector& ev = H.eig().values;
    if (!(ev(0) > 0.0)) throw IndefiniteError(H.offset(), n, 0.0);
    return {ev(0) * opt.lower_widen, ev(n - 1) * opt.upper_widen};
  }
  const std::uint64_t seed = block_seed(H);
  const auto up = lanczos_extremal([&](const Vector& x) { return Vector(H.matvec(x)); }, n,
                                   opt.lanczos_steps, seed);
  const auto inv = lanczos_extremal(
      [&](const Vector& x) { return Vector(H.shifted_solve(0.0, x)); }, n, opt.lanczos_steps,
      seed + 1);
  double alpha = 1.0 / inv.theta_max, beta = up.theta_max;
  if (up.breakdown || inv.breakdown || !(inv.theta_max > 0.0)) {
    const SpectralInterval g = gershgorin(H.dense());
    if (g.alpha > 0.0) alpha = std::min(alpha, g.alpha);
    beta = std::max(beta, g.beta);
  }
  if (!(alpha > 0.0)) throw IndefiniteError(H.offset(), n, 0.0);
  return {alpha * opt.lower_widen, beta * opt.upper_widen};
}

std::optional<SpectralInterval> SpectraCache::find(std::uint64_t id) const {
  std::lock_guard lock(mu_);
  auto it = map_.find(id);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void SpectraCache::insert(std::uint64_t id, SpectralInterval iv) {
  std::lock_guard lock(mu_);
  map_[id] = iv;
}

SpectralInterval SpectraCache::interval(const HMatrix& H) {
  if (auto hit = find(H.id())) return *hit;
  const SpectralInterval iv = estimate_interval(H, opt_);
  std::lock_guard lock(mu_);
  ++misses_;
  return map_.emplace(H.id(), iv).first->second;
}

std::size_t SpectraCache::size() const {
  std::lock_guard lock(mu_);
  return map_.size();
}

std::size_t SpectraCache::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

namespace {

SpectralInterval fill(const HMatrix& H, SpectraCache& cache) {
  if (auto hit = cache.find(H.id())) return *hit;
  SpectralInterval iv = estimate_interval(H, cache.options());
  if (!H.is_leaf()) {
    for (int c = 0; c < 2; ++c) {
      const SpectralInterval ci = fill(H.child(c), cache);
      iv.alpha = std::min(iv.alpha, ci.alpha);
      iv.beta = std::max(iv.beta, ci.beta);
    }
  }
  cache.insert(H.id(), iv);
  return iv;
}

}  // namespace

void estimate_spectra(const HMatrix& H, SpectraCache& cache) { fill(H, cache); }

}  // namespace teq
