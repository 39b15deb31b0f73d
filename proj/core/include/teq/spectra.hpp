#pragma once

#include "teq/hmatrix.hpp"

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <unordered_map>

namespace teq {

struct SpectralInterval {
  double alpha = 1.0;  // lower bound, > 0
  double beta = 1.0;   // upper bound, >= alpha

  double kappa() const noexcept { return beta / alpha; }
  SpectralInterval shifted(double s) const noexcept { return {alpha + s, beta + s}; }
  bool contains(const SpectralInterval& other) const noexcept {
    return alpha <= other.alpha && other.beta <= beta;
  }
};

struct LanczosResult {
  double theta_min = 0.0;
  double theta_max = 0.0;
  int steps = 0;
  bool breakdown = false;
};

// Lanczos with full reorthogonalization; returns the extremal Ritz values.
LanczosResult lanczos_extremal(const std::function<Vector(const Vector&)>& apply, Index n,
                               int steps, std::uint64_t seed);

SpectralInterval gershgorin(const Matrix& A);

struct SpectraOptions {
  int lanczos_steps = 30;
  double lower_widen = 0.95;
  double upper_widen = 1.05;
  Index dense_below = 64;  // blocks this small use a dense eigensolver
};

// Enclosure of the spectrum of one SPD block. The upper end comes from Lanczos
// on H, the lower end from Lanczos on H^{-1}.
SpectralInterval estimate_interval(const HMatrix& H, const SpectraOptions& opt = {});

// Per-node intervals keyed by node id. Thread-safe.
class SpectraCache {
 public:
  explicit SpectraCache(SpectraOptions opt = {}) : opt_(opt) {}
  SpectraCache(const SpectraCache&) = delete;
  SpectraCache& operator=(const SpectraCache&) = delete;

  std::optional<SpectralInterval> find(std::uint64_t id) const;
  void insert(std::uint64_t id, SpectralInterval iv);
  // Cached value, or a fresh estimate that is stored (and counted as a miss).
  SpectralInterval interval(const HMatrix& H);
  std::size_t size() const;
  std::size_t misses() const;

  const SpectraOptions& options() const noexcept { return opt_; }

 private:
  SpectraOptions opt_;
  mutable std::mutex mu_;
  std::unordered_map<std::uint64_t, SpectralInterval> map_;
  std::size_t misses_ = 0;
};

// Fills the cache for every node of H, bottom-up, so that each parent interval
// encloses those of its children.
void estimate_spectra(const HMatrix& H, SpectraCache& cache);

}  // namespace teq
