#include "teq/dnc.hpp"
#include "teq/error.hpp"

namespace teq {

namespace {

// Coefficient modes are the first eig.size() modes of B; a trailing extra mode
// (if any) is carried along untouched.
Tensor diag_solve(const std::vector<const EigenPair*>& eig, const std::vector<double>& shift,
                  const Tensor& B) {
  const int d = static_cast<int>(eig.size());
  if (B.order() < d || B.order() > d + 1)
    throw DimensionError("lyapnd_diag: tensor of order " + std::to_string(B.order()) + " for " +
                         std::to_string(d) + " coefficients");
  for (int t = 0; t < d; ++t)
    if (eig[t]->values.size() != B.dim(t))
      throw DimensionError("lyapnd_diag: coefficient " + std::to_string(t) + " has size " +
                           std::to_string(eig[t]->values.size()) + ", mode has " +
                           std::to_string(B.dim(t)));
  Tensor X = B;
  for (int t = 0; t < d; ++t) X = mode_product(X, t, eig[t]->vectors.transpose());
  // Eigenvalue sums over the coefficient modes, mode 0 fastest.
  Vector sums = eig[0]->values.array() + shift[0];
  for (int t = 1; t < d; ++t) {
    const Vector& ev = eig[t]->values;
    Vector next(sums.size() * ev.size());
    for (Index j = 0; j < ev.size(); ++j)
      next.segment(j * sums.size(), sums.size()) = sums.array() + (ev(j) + shift[t]);
    sums = std::move(next);
  }
  if (!(sums.minCoeff() > 0.0))
    throw StructureError("lyapnd_diag: Kronecker-sum operator is singular or indefinite");
  const Index Nc = sums.size(), batch = X.size() / Nc;
  auto M = X.reshaped(Nc, batch);
  M.array().colwise() /= sums.array();
  for (int t = 0; t < d; ++t) X = mode_product(X, t, eig[t]->vectors);
  return X;
}

}  // namespace

Tensor lyapnd_diag(const std::vector<Matrix>& coeffs, const Tensor& B) {
  std::vector<EigenPair> pairs(coeffs.size());
  std::vector<const EigenPair*> ptr;
  for (std::size_t t = 0; t < coeffs.size(); ++t) {
    if (coeffs[t].rows() != coeffs[t].cols())
      throw DimensionError("lyapnd_diag: coefficient " + std::to_string(t) + " is not square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(coeffs[t]);
    pairs[t].values = es.eigenvalues();
    pairs[t].vectors = es.eigenvectors();
    ptr.push_back(&pairs[t]);
  }
  return diag_solve(ptr, std::vector<double>(coeffs.size(), 0.0), B);
}

Tensor lyapnd_diag(const std::vector<Coefficient>& coeffs, const Tensor& B) {
  std::vector<const EigenPair*> ptr;
  std::vector<double> shift;
  for (const auto& c : coeffs) {
    ptr.push_back(&c.H.eig());
    shift.push_back(c.shift);
  }
  return diag_solve(ptr, shift, B);
}

}  // namespace teq
