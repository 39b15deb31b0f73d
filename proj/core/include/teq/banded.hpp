#pragma once

#include "teq/tensor.hpp"

namespace teq {

// Symmetric band matrix stored by its lower band: band(k, j) = A(j + k, j).
class BandedMatrix {
 public:
  BandedMatrix(Index n, Index bandwidth);
  BandedMatrix(Index n, Index bandwidth, Matrix band);

  Index size() const noexcept { return n_; }
  Index bandwidth() const noexcept { return bw_; }
  const Matrix& band() const noexcept { return band_; }

  double operator()(Index i, Index j) const;
  void set(Index i, Index j, double value);  // sets A(i,j) and A(j,i)

  Matrix dense() const;
  Matrix dense_block(Index row0, Index rows, Index col0, Index cols) const;
  Matrix multiply(const Matrix& X) const;

  // (A(r, r) + sigma I)^{-1} B for the principal range r = [offset, offset+size),
  // by banded Cholesky. Throws IndefiniteError.
  Matrix shifted_solve(Index offset, Index size, double sigma, const Matrix& B) const;

 private:
  Index n_, bw_;
  Matrix band_;
};

}  // namespace teq
