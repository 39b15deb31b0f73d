#include "teq/operators.hpp"

#include "teq/error.hpp"

namespace teq {

DenseOperator::DenseOperator(Matrix A) : A_(std::move(A)) {
  if (A_.rows() != A_.cols()) throw DimensionError("DenseOperator needs a square matrix");
}

Matrix DenseOperator::shifted_solve(double sigma, const Matrix& B) const {
  Matrix M = A_;
  M.diagonal().array() += sigma;
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) throw IndefiniteError(0, A_.rows(), sigma);
  return llt.solve(B);
}

namespace {

// Views an (n*b) x m block as n x (b*m); both orderings keep column-major data.
Eigen::Map<const Matrix> as_fibers(const Matrix& X, Index n) {
  return {X.data(), n, X.size() / n};
}

}  // namespace

Matrix HMatrixOperator::apply(const Matrix& X) const {
  if (X.rows() != size()) throw DimensionError("HMatrixOperator::apply row count mismatch");
  const Index n = H_.size();
  Matrix Y = H_.matvec(as_fibers(X, n));
  if (shift_ != 0.0) Y += shift_ * as_fibers(X, n);
  Y.resize(X.rows(), X.cols());
  return Y;
}

Matrix HMatrixOperator::shifted_solve(double sigma, const Matrix& B) const {
  if (B.rows() != size()) throw DimensionError("HMatrixOperator::shifted_solve row count mismatch");
  Matrix Y = H_.shifted_solve(shift_ + sigma, as_fibers(B, H_.size()));
  Y.resize(B.rows(), B.cols());
  return Y;
}

}  // namespace teq
