#include "teq/tensor.hpp"

#include "teq/error.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

namespace teq {

namespace {

void check_mode(const Dims& dims, int t) {
  if (t < 0 || t >= static_cast<int>(dims.size())) {
    std::ostringstream os;
    os << "mode " << t << " out of range for a tensor of order " << dims.size();
    throw DimensionError(os.str());
  }
}

void check_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": tensor dimensions differ");
}

}  // namespace

Index product(const Dims& dims) {
  Index p = 1;
  for (Index n : dims) p *= n;
  return p;
}

Index left_size(const Dims& dims, int t) {
  Index p = 1;
  for (int j = 0; j < t; ++j) p *= dims[j];
  return p;
}

Index right_size(const Dims& dims, int t) {
  Index p = 1;
  for (std::size_t j = t + 1; j < dims.size(); ++j) p *= dims[j];
  return p;
}

Tensor::Tensor(Dims dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("tensor needs at least one mode");
  for (Index n : dims_)
    if (n < 1) throw DimensionError("tensor mode sizes must be positive");
  data_.assign(static_cast<std::size_t>(product(dims_)), 0.0);
}

Tensor::Tensor(Dims dims, std::vector<double> data) : Tensor(std::move(dims)) {
  if (static_cast<Index>(data.size()) != size())
    throw DimensionError("data length " + std::to_string(data.size()) +
                         " does not match dims product " + std::to_string(size()));
  data_ = std::move(data);
}

Tensor Tensor::constant(Dims dims, double value) {
  Tensor X(std::move(dims));
  std::fill(X.data_.begin(), X.data_.end(), value);
  return X;
}

Tensor Tensor::random(Dims dims, std::uint64_t seed) {
  Tensor X(std::move(dims));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (double& x : X.data_) x = nd(rng);
  return X;
}

Tensor Tensor::from_matrix(const Matrix& M) {
  Tensor X({M.rows(), M.cols()});
  X.reshaped(M.rows(), M.cols()) = M;
  return X;
}

Index Tensor::linear_index(const std::vector<Index>& idx) const {
  if (idx.size() != dims_.size()) throw DimensionError("index arity does not match tensor order");
  Index lin = 0, stride = 1;
  for (std::size_t t = 0; t < dims_.size(); ++t) {
    if (idx[t] < 0 || idx[t] >= dims_[t]) throw RangeError("tensor index out of range");
    lin += idx[t] * stride;
    stride *= dims_[t];
  }
  return lin;
}

Eigen::Map<Matrix> Tensor::reshaped(Index rows, Index cols) {
  if (rows * cols != size()) throw DimensionError("reshape does not preserve the entry count");
  return {data_.data(), rows, cols};
}

Eigen::Map<const Matrix> Tensor::reshaped(Index rows, Index cols) const {
  if (rows * cols != size()) throw DimensionError("reshape does not preserve the entry count");
  return {data_.data(), rows, cols};
}

Eigen::Map<Vector> Tensor::vec() { return {data_.data(), size()}; }
Eigen::Map<const Vector> Tensor::vec() const { return {data_.data(), size()}; }

double Tensor::norm() const { return vec().norm(); }

Matrix Tensor::to_matrix() const {
  if (order() != 2) throw DimensionError("to_matrix needs an order-2 tensor");
  return reshaped(dims_[0], dims_[1]);
}

Tensor& Tensor::operator+=(const Tensor& other) {
  check_same_dims(dims_, other.dims_, "operator+=");
  vec() += other.vec();
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  check_same_dims(dims_, other.dims_, "operator-=");
  vec() -= other.vec();
  return *this;
}

Tensor& Tensor::operator*=(double a) {
  vec() *= a;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double a, Tensor x) { return x *= a; }

Matrix matricize(const Tensor& X, int t) {
  check_mode(X.dims(), t);
  const Index n = X.dim(t), L = left_size(X.dims(), t), R = right_size(X.dims(), t);
  if (L == 1) return X.reshaped(n, R);
  Matrix M(n, L * R);
  // The slab for fixed r is an L x n column-major block; its transpose is the
  // n x L part of the unfolding.
  for (Index r = 0; r < R; ++r) {
    Eigen::Map<const Matrix> slab(X.data() + r * L * n, L, n);
    M.middleCols(r * L, L) = slab.transpose();
  }
  return M;
}

Tensor tensorize(const Matrix& M, int t, const Dims& dims) {
  check_mode(dims, t);
  const Index n = dims[t], L = left_size(dims, t), R = right_size(dims, t);
  if (M.rows() != n || M.cols() != L * R)
    throw DimensionError("tensorize: matrix is " + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()) + ", expected " + std::to_string(n) + "x" +
                         std::to_string(L * R));
  Tensor X(dims);
  if (L == 1) {
    X.reshaped(n, R) = M;
    return X;
  }
  for (Index r = 0; r < R; ++r) {
    Eigen::Map<Matrix> slab(X.data() + r * L * n, L, n);
    slab = M.middleCols(r * L, L).transpose();
  }
  return X;
}

Tensor mode_product(const Tensor& X, int t, const Matrix& A) {
  check_mode(X.dims(), t);
  const Index n = X.dim(t);
  if (A.cols() != n)
    throw DimensionError("mode_product: mode " + std::to_string(t) + " has size " +
                         std::to_string(n) + " but the matrix has " + std::to_string(A.cols()) +
                         " columns");
  Dims out_dims = X.dims();
  out_dims[t] = A.rows();
  Tensor Y(out_dims);
  const Index L = left_size(X.dims(), t), R = right_size(X.dims(), t), m = A.rows();
  if (L == 1) {
    Y.reshaped(m, R).noalias() = A * X.reshaped(n, R);
    return Y;
  }
  for (Index r = 0; r < R; ++r) {
    Eigen::Map<const Matrix> in(X.data() + r * L * n, L, n);
    Eigen::Map<Matrix> out(Y.data() + r * L * m, L, m);
    out.noalias() = in * A.transpose();
  }
  return Y;
}

Tensor mode_apply(const Tensor& X, int t, const FiberMap& op, Index out_rows) {
  check_mode(X.dims(), t);
  Matrix M = op(matricize(X, t));
  Dims out_dims = X.dims();
  out_dims[t] = out_rows < 0 ? X.dim(t) : out_rows;
  if (M.rows() != out_dims[t])
    throw DimensionError("mode_apply: operator returned " + std::to_string(M.rows()) + " rows");
  return tensorize(M, t, out_dims);
}

namespace {

void check_ranges(const Dims& dims, const std::vector<IndexRange>& ranges) {
  if (ranges.size() != dims.size()) throw DimensionError("one index range per mode is required");
  for (std::size_t t = 0; t < dims.size(); ++t) {
    const auto& r = ranges[t];
    if (r.begin < 0 || r.size < 1 || r.begin + r.size > dims[t])
      throw RangeError("range [" + std::to_string(r.begin) + ", " +
                       std::to_string(r.begin + r.size) + ") outside mode " + std::to_string(t) +
                       " of size " + std::to_string(dims[t]));
  }
}

// Visits every contiguous mode-0 run of the block, calling f(offset in X,
// offset in block, run length).
template <class F>
void for_each_run(const Dims& dims, const std::vector<IndexRange>& ranges, F&& f) {
  const std::size_t d = dims.size();
  std::vector<Index> idx(d, 0);
  const Index run = ranges[0].size;
  Index block_off = 0;
  while (true) {
    Index off = ranges[0].begin, stride = dims[0];
    for (std::size_t t = 1; t < d; ++t) {
      off += (ranges[t].begin + idx[t]) * stride;
      stride *= dims[t];
    }
    f(off, block_off, run);
    block_off += run;
    std::size_t t = 1;
    for (; t < d; ++t) {
      if (++idx[t] < ranges[t].size) break;
      idx[t] = 0;
    }
    if (t == d) break;
  }
}

}  // namespace

Tensor block_view(const Tensor& X, const std::vector<IndexRange>& ranges) {
  check_ranges(X.dims(), ranges);
  Dims bd(ranges.size());
  for (std::size_t t = 0; t < ranges.size(); ++t) bd[t] = ranges[t].size;
  Tensor B(bd);
  for_each_run(X.dims(), ranges, [&](Index off, Index boff, Index run) {
    std::memcpy(B.data() + boff, X.data() + off, sizeof(double) * run);
  });
  return B;
}

void block_write(Tensor& X, const std::vector<IndexRange>& ranges, const Tensor& block) {
  check_ranges(X.dims(), ranges);
  for (std::size_t t = 0; t < ranges.size(); ++t)
    if (block.dim(static_cast<int>(t)) != ranges[t].size)
      throw DimensionError("block_write: block shape does not match ranges");
  for_each_run(X.dims(), ranges, [&](Index off, Index boff, Index run) {
    std::memcpy(X.data() + off, block.data() + boff, sizeof(double) * run);
  });
}

Tensor kron_sum_apply(const std::vector<Matrix>& coeffs, const Tensor& X) {
  if (static_cast<int>(coeffs.size()) != X.order())
    throw DimensionError("kron_sum_apply: " + std::to_string(coeffs.size()) +
                         " coefficients for a tensor of order " + std::to_string(X.order()));
  Tensor Y(X.dims());
  for (int t = 0; t < X.order(); ++t) {
    if (coeffs[t].rows() != coeffs[t].cols())
      throw DimensionError("kron_sum_apply: coefficient " + std::to_string(t) + " is not square");
    Y += mode_product(X, t, coeffs[t]);
  }
  return Y;
}

Tensor kron_sum_apply_ops(const std::vector<FiberMap>& coeffs, const Tensor& X) {
  if (static_cast<int>(coeffs.size()) != X.order())
    throw DimensionError("kron_sum_apply: coefficient count does not match tensor order");
  Tensor Y(X.dims());
  for (int t = 0; t < X.order(); ++t) Y += mode_apply(X, t, coeffs[t]);
  return Y;
}

double residual_norm(const std::vector<Matrix>& coeffs, const Tensor& X, const Tensor& B) {
  check_same_dims(X.dims(), B.dims(), "residual_norm");
  return (kron_sum_apply(coeffs, X) - B).norm();
}

double residual_norm_ops(const std::vector<FiberMap>& coeffs, const Tensor& X, const Tensor& B) {
  check_same_dims(X.dims(), B.dims(), "residual_norm");
  return (kron_sum_apply_ops(coeffs, X) - B).norm();
}

Matrix kron_sum_matrix(const std::vector<Matrix>& coeffs) {
  Index N = 1;
  for (const auto& A : coeffs) N *= A.rows();
  Matrix K = Matrix::Zero(N, N);
  Index L = 1;
  for (const auto& A : coeffs) {
    const Index n = A.rows(), R = N / (L * n);
    // I_R (x) A (x) I_L in the mode-0-fastest ordering.
    for (Index r = 0; r < R; ++r)
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
          const double a = A(i, j);
          if (a == 0.0) continue;
          for (Index l = 0; l < L; ++l) K(l + L * (i + n * r), l + L * (j + n * r)) += a;
        }
    L *= n;
  }
  return K;
}

}  // namespace teq
