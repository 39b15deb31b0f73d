#include "teq/zolotarev.hpp"

#include "teq/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <string>

namespace teq {

void IntervalPair::validate() const {
  if (!(a1 > 0.0 && a1 <= b1 && a2 > 0.0 && a2 <= b2) || !std::isfinite(b1) || !std::isfinite(b2))
    throw StructureError("interval pair needs 0 < a1 <= b1 and 0 < a2 <= b2, got [" +
                         std::to_string(a1) + ", " + std::to_string(b1) + "] and [-" +
                         std::to_string(b2) + ", -" + std::to_string(a2) + "]");
}

double IntervalPair::gamma() const { return (a1 + b2) * (a2 + b1) / ((a1 + a2) * (b1 + b2)); }

double ShiftSet::eval_prefix(double z, int j) const {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= (z - p[i]) / (z - q[i]);
  return r;
}

double ShiftSet::eval(double z) const { return eval_prefix(z, s); }

namespace {

// Maps t = (z' - 1) / (b' - z') scaled by the cross-ratio factor back to
// [a, b] as a convex combination, which keeps full relative accuracy at both
// ends of the interval.
double from_ratio(double tau, double a, double b) { return (a + tau * b) / (1.0 + tau); }

}  // namespace

ShiftSet zolotarev_shifts(int s, const IntervalPair& pr) {
  if (s < 1) throw StructureError("zolotarev_shifts needs s >= 1");
  pr.validate();
  ShiftSet out;
  out.s = s;
  out.source = pr;
  out.p.resize(s);
  out.q.resize(s);
  const bool e_point = pr.a1 == pr.b1, f_point = pr.a2 == pr.b2;
  if (e_point || f_point) {
    // A point interval is annihilated exactly by a single shift.
    const double p = e_point ? pr.a1 : std::clamp(pr.a2, pr.a1, pr.b1);
    const double q = f_point ? -pr.a2 : -std::clamp(pr.a1, pr.a2, pr.b2);
    std::fill(out.p.begin(), out.p.end(), p);
    std::fill(out.q.begin(), out.q.end(), q);
    return out;
  }
  // Symmetric configuration [-m, -1] u [1, m] with the same cross-ratio.
  const double g = pr.gamma();
  const double m = 2.0 * g - 1.0 + 2.0 * std::sqrt(g * (g - 1.0));
  const double kp = 1.0 / m;
  const double K = elliptic_K_complement(kp);
  const double c1 = (1.0 + m) * (pr.a1 + pr.a2) / (2.0 * (pr.a2 + pr.b1));
  const double c2 = (1.0 + m) * (pr.a2 + pr.a1) / (2.0 * (pr.a1 + pr.b2));
  for (int j = 1; j <= s; ++j) {
    const double u = (2.0 * j - 1.0) * K / (2.0 * s);
    // rho = (dn - k') / (1 - dn) is the position of m*dn in [1, m] measured
    // as (z' - 1) / (m - z'), written without cancellation.
    double rho;
    if (u <= 0.5 * K) {
      const auto f = jacobi_sncndn_complement(u, kp);
      rho = f.cn * f.cn * (1.0 + f.dn) / (f.sn * f.sn * (f.dn + kp));
    } else {
      const auto f = jacobi_sncndn_complement(K - u, kp);
      rho = kp * f.sn * f.sn * (f.dn + kp) / ((1.0 + f.dn) * f.cn * f.cn);
    }
    out.p[j - 1] = from_ratio(rho * c1, pr.a1, pr.b1);
    out.q[j - 1] = -from_ratio(rho * c2, pr.a2, pr.b2);
  }
  std::vector<int> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return std::abs(out.p[x]) < std::abs(out.p[y]); });
  std::vector<double> p(s), q(s);
  for (int i = 0; i < s; ++i) {
    p[i] = out.p[order[i]];
    q[i] = out.q[order[i]];
  }
  out.p = std::move(p);
  out.q = std::move(q);
  return out;
}

double zolotarev_bound(int j, const IntervalPair& pr) {
  pr.validate();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 4.0 * std::exp(-pi2 * j / std::log(16.0 * pr.gamma()));
}

namespace {

int ceil_count(double x) {
  const double c = std::ceil(x);
  return std::max(1, static_cast<int>(c));
}

}  // namespace

int shift_count_adi(double eps, const IntervalPair& pr) {
  pr.validate();
  if (!(eps > 0.0)) throw ConfigError("shift_count_adi needs eps > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return ceil_count(std::log(4.0 / eps) * std::log(16.0 * pr.gamma()) / pi2);
}

int shift_count_rk(double eps, const IntervalPair& pr) {
  pr.validate();
  if (!(eps > 0.0)) throw ConfigError("shift_count_rk needs eps > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double sum = pr.a1 + pr.a2 + pr.b1 + pr.b2;
  return ceil_count(std::log(8.0 * sum / (eps * (pr.a1 + pr.a2))) * std::log(16.0 * pr.gamma()) /
                    pi2);
}

int shift_count_tensor(double eps, int d, double alpha, double beta) {
  if (d < 3) throw ConfigError("shift_count_tensor needs d >= 3");
  if (!(alpha > 0.0 && alpha <= beta)) throw StructureError("shift_count_tensor needs 0 < alpha <= beta");
  if (!(eps > 0.0)) throw ConfigError("shift_count_tensor needs eps > 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double kappa = beta / alpha;
  const double a = std::log(2.0 * d * kappa / eps);
  const double b = std::log(8.0 * (alpha + (d - 1) * beta) * (alpha + beta) / (d * alpha * beta));
  return ceil_count(a * b / pi2);
}

}  // namespace teq
