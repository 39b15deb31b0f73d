#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace teq {

// Shapes that do not fit together (mode sizes, factor column counts, ...).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Input that violates a structural precondition: non-symmetric, bad interval, ...
struct StructureError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cholesky failed on the diagonal block [offset, offset + size) after shifting.
class IndefiniteError : public std::runtime_error {
 public:
  IndefiniteError(std::int64_t offset, std::int64_t size, double shift)
      : std::runtime_error("block [" + std::to_string(offset) + ", " +
                           std::to_string(offset + size) + ") is not positive definite at shift " +
                           std::to_string(shift)),
        offset_(offset), size_(size), shift_(shift) {}
  std::int64_t offset() const noexcept { return offset_; }
  std::int64_t size() const noexcept { return size_; }
  double shift() const noexcept { return shift_; }

 private:
  std::int64_t offset_, size_;
  double shift_;
};

// A low-rank solver failed; step is the 1-based iteration that raised.
class SolverError : public std::runtime_error {
 public:
  SolverError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace teq
