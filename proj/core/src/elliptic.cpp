#include "teq/error.hpp"
#include "teq/zolotarev.hpp"

#include <cmath>
#include <numbers>

namespace teq {

namespace {

double agm(double a, double b) {
  for (int it = 0; it < 64 && std::abs(a - b) > 1e-16 * a; ++it) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return 0.5 * (a + b);
}

}  // namespace

double elliptic_K_complement(double kp) {
  if (!(kp > 0.0) || kp > 1.0) throw StructureError("complementary modulus must lie in (0, 1]");
  return std::numbers::pi / (2.0 * agm(1.0, kp));
}

double elliptic_K(double k) {
  if (!(k >= 0.0) || k >= 1.0) throw StructureError("elliptic_K needs 0 <= k < 1");
  return elliptic_K_complement(std::sqrt((1.0 - k) * (1.0 + k)));
}

JacobiSnCnDn jacobi_sncndn_complement(double u, double kp) {
  if (!(kp > 0.0) || kp > 1.0) throw StructureError("complementary modulus must lie in (0, 1]");
  if (kp == 1.0) return {std::sin(u), std::cos(u), 1.0};
  constexpr int kMax = 40;
  double a[kMax + 1], c[kMax + 1];
  a[0] = 1.0;
  double b = kp;
  c[0] = std::sqrt((1.0 - kp) * (1.0 + kp));
  int N = 0;
  while (N < kMax && std::abs(c[N]) > 1e-17 * a[N]) {
    a[N + 1] = 0.5 * (a[N] + b);
    c[N + 1] = 0.5 * (a[N] - b);
    b = std::sqrt(a[N] * b);
    ++N;
  }
  double phi = std::ldexp(a[N] * u, N);
  for (int n = N; n > 0; --n) {
    phi = 0.5 * (phi + std::asin(c[n] / a[n] * std::sin(phi)));
  }
  const double sn = std::sin(phi), cn = std::cos(phi);
  const double dn = std::sqrt(cn * cn + kp * kp * sn * sn);
  return {sn, cn, dn};
}

JacobiSnCnDn jacobi_sncndn(double u, double k) {
  if (!(k >= 0.0) || k >= 1.0) throw StructureError("jacobi functions need 0 <= k < 1");
  return jacobi_sncndn_complement(u, std::sqrt((1.0 - k) * (1.0 + k)));
}

double jacobi_dn(double u, double k) { return jacobi_sncndn(u, k).dn; }

}  // namespace teq
