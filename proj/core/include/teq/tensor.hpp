#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace teq {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<Index>;

// Dense d-way array, column-major with mode 0 varying fastest.
// Modes are 0-based throughout the library.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Dims dims);
  Tensor(Dims dims, std::vector<double> data);

  static Tensor zeros(Dims dims) { return Tensor(std::move(dims)); }
  static Tensor constant(Dims dims, double value);
  // Standard normal entries from std::mt19937_64.
  static Tensor random(Dims dims, std::uint64_t seed);
  static Tensor from_matrix(const Matrix& M);

  const Dims& dims() const noexcept { return dims_; }
  int order() const noexcept { return static_cast<int>(dims_.size()); }
  Index dim(int t) const { return dims_.at(static_cast<std::size_t>(t)); }
  Index size() const noexcept { return static_cast<Index>(data_.size()); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  const std::vector<double>& values() const noexcept { return data_; }

  Index linear_index(const std::vector<Index>& idx) const;
  double& operator()(const std::vector<Index>& idx) { return data_[linear_index(idx)]; }
  double operator()(const std::vector<Index>& idx) const { return data_[linear_index(idx)]; }

  // Zero-copy views of the data as a rows x cols column-major matrix.
  Eigen::Map<Matrix> reshaped(Index rows, Index cols);
  Eigen::Map<const Matrix> reshaped(Index rows, Index cols) const;
  Eigen::Map<Vector> vec();
  Eigen::Map<const Vector> vec() const;

  double norm() const;
  Matrix to_matrix() const;  // order 2 only

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double a);

 private:
  Dims dims_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double a, Tensor x);

// Number of entries before / after mode t in the linear order.
Index left_size(const Dims& dims, int t);
Index right_size(const Dims& dims, int t);
Index product(const Dims& dims);

// n_t x (prod of the other sizes). Column index of entry (i_0..i_{d-1}) is
// l + L*r where l enumerates modes < t (mode 0 fastest) and r the modes > t.
Matrix matricize(const Tensor& X, int t);
Tensor tensorize(const Matrix& M, int t, const Dims& dims);

Tensor mode_product(const Tensor& X, int t, const Matrix& A);

// Applies a linear map to every mode-t fiber. The callable receives a block of
// fibers as columns and must return the same number of columns.
using FiberMap = std::function<Matrix(const Matrix&)>;
Tensor mode_apply(const Tensor& X, int t, const FiberMap& op, Index out_rows = -1);

struct IndexRange {
  Index begin = 0;
  Index size = 0;
};

Tensor block_view(const Tensor& X, const std::vector<IndexRange>& ranges);
void block_write(Tensor& X, const std::vector<IndexRange>& ranges, const Tensor& block);

// Sum over t of X x_t A_t.
Tensor kron_sum_apply(const std::vector<Matrix>& coeffs, const Tensor& X);
// Same with each coefficient given as a map on blocks of fibers (e.g. a hierarchical matvec).
Tensor kron_sum_apply_ops(const std::vector<FiberMap>& coeffs, const Tensor& X);

double residual_norm(const std::vector<Matrix>& coeffs, const Tensor& X, const Tensor& B);
double residual_norm_ops(const std::vector<FiberMap>& coeffs, const Tensor& X, const Tensor& B);

// Explicit Kronecker-sum matrix acting on vec(X); only for small problems.
Matrix kron_sum_matrix(const std::vector<Matrix>& coeffs);

}  // namespace teq
