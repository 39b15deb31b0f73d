#include "teq/banded.hpp"

#include "teq/error.hpp"

#include <algorithm>
#include <cmath>

namespace teq {

BandedMatrix::BandedMatrix(Index n, Index bandwidth)
    : n_(n), bw_(bandwidth), band_(Matrix::Zero(bandwidth + 1, n)) {
  if (n < 1 || bandwidth < 0) throw DimensionError("band matrix needs n >= 1 and bandwidth >= 0");
}

BandedMatrix::BandedMatrix(Index n, Index bandwidth, Matrix band)
    : BandedMatrix(n, bandwidth) {
  if (band.rows() != bw_ + 1 || band.cols() != n_)
    throw DimensionError("band storage must be (bandwidth+1) x n");
  band_ = std::move(band);
}

double BandedMatrix::operator()(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  return i - j > bw_ ? 0.0 : band_(i - j, j);
}

void BandedMatrix::set(Index i, Index j, double value) {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) throw RangeError("entry outside the band");
  band_(i - j, j) = value;
}

Matrix BandedMatrix::dense() const { return dense_block(0, n_, 0, n_); }

Matrix BandedMatrix::dense_block(Index row0, Index rows, Index col0, Index cols) const {
  Matrix M = Matrix::Zero(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    const Index gj = col0 + j;
    const Index lo = std::max(row0, gj - bw_), hi = std::min(row0 + rows, gj + bw_ + 1);
    for (Index gi = lo; gi < hi; ++gi) M(gi - row0, j) = (*this)(gi, gj);
  }
  return M;
}

Matrix BandedMatrix::multiply(const Matrix& X) const {
  if (X.rows() != n_) throw DimensionError("band multiply: row count mismatch");
  Matrix Y = Matrix::Zero(n_, X.cols());
  for (Index j = 0; j < n_; ++j) {
    Y.row(j) += band_(0, j) * X.row(j);
    for (Index k = 1; k <= bw_ && j + k < n_; ++k) {
      const double a = band_(k, j);
      Y.row(j + k) += a * X.row(j);
      Y.row(j) += a * X.row(j + k);
    }
  }
  return Y;
}

Matrix BandedMatrix::shifted_solve(Index offset, Index size, double sigma, const Matrix& B) const {
  if (offset < 0 || size < 1 || offset + size > n_) throw RangeError("band solve range");
  if (B.rows() != size) throw DimensionError("band solve: right-hand side row count mismatch");
  // Lower band Cholesky factor, L(k, j) = L(j + k, j).
  Matrix L = band_.middleCols(offset, size);
  L.row(0).array() += sigma;
  for (Index j = 0; j < size; ++j) {
    double djj = L(0, j);
    if (!(djj > 0.0)) throw IndefiniteError(offset, size, sigma);
    djj = std::sqrt(djj);
    L(0, j) = djj;
    const Index kmax = std::min(bw_, size - 1 - j);
    for (Index k = 1; k <= kmax; ++k) L(k, j) /= djj;
    // Rank-1 update of the trailing band.
    for (Index c = 1; c <= kmax; ++c) {
      const double lc = L(c, j);
      for (Index k = 0; k + c <= kmax; ++k) L(k, j + c) -= L(k + c, j) * lc;
    }
  }
  Matrix X = B;
  for (Index j = 0; j < size; ++j) {
    X.row(j) /= L(0, j);
    const Index kmax = std::min(bw_, size - 1 - j);
    for (Index k = 1; k <= kmax; ++k) X.row(j + k) -= L(k, j) * X.row(j);
  }
  for (Index j = size - 1; j >= 0; --j) {
    const Index kmax = std::min(bw_, size - 1 - j);
    for (Index k = 1; k <= kmax; ++k) X.row(j) -= L(k, j) * X.row(j + k);
    X.row(j) /= L(0, j);
  }
  return X;
}

}  // namespace teq
