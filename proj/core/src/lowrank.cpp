#include "teq/lowrank.hpp"

#include "teq/error.hpp"

#include <cmath>

namespace teq {

LowRank::LowRank(Matrix u, Matrix v) : U(std::move(u)), V(std::move(v)) {
  if (U.cols() != V.cols())
    throw DimensionError("low-rank factors have " + std::to_string(U.cols()) + " and " +
                         std::to_string(V.cols()) + " columns");
}

Matrix LowRank::dense() const {
  if (rank() == 0) return Matrix::Zero(rows(), cols());
  return U * V.transpose();
}

double LowRank::norm() const {
  if (rank() == 0) return 0.0;
  // ||U V^T|| = ||R_U R_V^T|| for U = Q_U R_U, V = Q_V R_V. Forming the Gram
  // matrices instead would square the cancellation in residual factors.
  auto r_factor = [](const Matrix& A) -> Matrix {
    Eigen::HouseholderQR<Matrix> qr(A);
    const Index p = std::min(A.rows(), A.cols());
    return qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  };
  return (r_factor(U) * r_factor(V).transpose()).norm();
}

ThinQR thin_qr(const Matrix& A) {
  const Index m = A.rows(), r = A.cols(), p = std::min(m, r);
  Eigen::HouseholderQR<Matrix> qr(A);
  ThinQR out;
  out.Q = qr.householderQ() * Matrix::Identity(m, p);
  out.R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  return out;
}

namespace {

// Keeps the leading singular triplets; the discarded tail has squared Frobenius
// norm at most budget(total squared norm).
template <class Budget>
LowRank truncate(const LowRank& L, Budget budget) {
  if (L.rank() == 0) return L;
  const ThinQR qu = thin_qr(L.U), qv = thin_qr(L.V);
  Eigen::BDCSVD<Matrix> svd(qu.R * qv.R.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double total = s.squaredNorm();
  Index r = s.size();
  if (total == 0.0) {
    r = 0;
  } else {
    double tail = 0.0;
    const double allowed = budget(total);
    while (r > 0) {
      const double next = tail + s(r - 1) * s(r - 1);
      if (s(r - 1) > 0.0 && next > allowed) break;
      tail = next;
      --r;
    }
  }
  LowRank out;
  out.U = qu.Q * (svd.matrixU().leftCols(r) * s.head(r).asDiagonal());
  out.V = qv.Q * svd.matrixV().leftCols(r);
  return out;
}

}  // namespace

LowRank recompress(const LowRank& L, double tol) {
  return truncate(L, [tol](double total) { return tol * tol * total; });
}

LowRank recompress_absolute(const LowRank& L, double tol) {
  return truncate(L, [tol](double) { return tol * tol; });
}

LowRank orthonormalize_right(const LowRank& L) {
  if (L.rank() == 0) return L;
  const ThinQR q = thin_qr(L.V);
  return {L.U * q.R.transpose(), q.Q};
}

LowRank concat(const LowRank& a, const LowRank& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("concat: low-rank shapes differ");
  LowRank out;
  out.U.resize(a.rows(), a.rank() + b.rank());
  out.V.resize(a.cols(), a.rank() + b.rank());
  out.U << a.U, b.U;
  out.V << a.V, b.V;
  return out;
}

Matrix orthonormal_extension(const Matrix& Q, const Matrix& A, double drop_tol) {
  Matrix out(A.rows(), 0);
  Matrix basis = Q;
  for (Index j = 0; j < A.cols(); ++j) {
    Vector v = A.col(j);
    const double nrm0 = v.norm();
    if (nrm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
    }
    const double nrm = v.norm();
    if (nrm <= drop_tol * nrm0) continue;
    v /= nrm;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v;
    out.conservativeResize(Eigen::NoChange, out.cols() + 1);
    out.col(out.cols() - 1) = v;
  }
  return out;
}

}  // namespace teq
