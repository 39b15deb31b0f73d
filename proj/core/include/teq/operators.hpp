#pragma once

#include "teq/hmatrix.hpp"
#include "teq/tensor.hpp"

namespace teq {

// Symmetric positive definite operator with shifted solves.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;
  virtual Index size() const = 0;
  virtual Matrix apply(const Matrix& X) const = 0;
  // (A + sigma I)^{-1} B
  virtual Matrix shifted_solve(double sigma, const Matrix& B) const = 0;
};

class DenseOperator final : public SymmetricOperator {
 public:
  explicit DenseOperator(Matrix A);
  Index size() const override { return A_.rows(); }
  Matrix apply(const Matrix& X) const override { return A_ * X; }
  Matrix shifted_solve(double sigma, const Matrix& B) const override;
  const Matrix& matrix() const noexcept { return A_; }

 private:
  Matrix A_;
};

// H + shift I. When the right-hand side has more rows than H it is treated as
// a stack of blocks: rows are read column-major as an n x (rows/n * cols) matrix.
class HMatrixOperator final : public SymmetricOperator {
 public:
  explicit HMatrixOperator(HMatrix H, double shift = 0.0, Index batch = 1)
      : H_(std::move(H)), shift_(shift), batch_(batch) {}
  Index size() const override { return H_.size() * batch_; }
  Matrix apply(const Matrix& X) const override;
  Matrix shifted_solve(double sigma, const Matrix& B) const override;
  const HMatrix& hmatrix() const noexcept { return H_; }
  double shift() const noexcept { return shift_; }

 private:
  HMatrix H_;
  double shift_;
  Index batch_;
};

}  // namespace teq
