#pragma once

#include <vector>

namespace teq {

// Complete elliptic integral of the first kind, modulus k in [0, 1).
double elliptic_K(double k);
// Same integral parametrized by the complementary modulus k' = sqrt(1 - k^2),
// accurate when k is close to 1.
double elliptic_K_complement(double kp);

struct JacobiSnCnDn {
  double sn, cn, dn;
};
// Jacobi elliptic functions by the descending Landen (AGM) scheme, given the
// complementary modulus k'.
JacobiSnCnDn jacobi_sncndn_complement(double u, double kp);
JacobiSnCnDn jacobi_sncndn(double u, double k);
double jacobi_dn(double u, double k);

// E = [a1, b1] on the positive axis, F = [-b2, -a2] on the negative axis.
struct IntervalPair {
  double a1, b1, a2, b2;

  void validate() const;
  double gamma() const;  // cross-ratio (a1+b2)(a2+b1) / ((a1+a2)(b1+b2))
  double kappa() const { return (b1 + b2) / (a1 + a2); }
};

// Zeros p_j in E and poles q_j in F of the extremal rational function, so
// that A1 - q_j I and A2 + p_j I stay positive definite.
struct ShiftSet {
  int s = 0;
  std::vector<double> p;
  std::vector<double> q;
  IntervalPair source{};

  // prod_j (z - p_j) / (z - q_j)
  double eval(double z) const;
  double eval_prefix(double z, int j) const;  // first j factors
};

ShiftSet zolotarev_shifts(int s, const IntervalPair& pair);
// 4 exp(-pi^2 j / log(16 gamma))
double zolotarev_bound(int j, const IntervalPair& pair);
int shift_count_adi(double eps, const IntervalPair& pair);
int shift_count_rk(double eps, const IntervalPair& pair);
int shift_count_tensor(double eps, int d, double alpha, double beta);

}  // namespace teq
