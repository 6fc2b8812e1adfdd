#include "histdirac/bessel.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "histdirac/errors.hpp"

namespace histdirac::special {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSeriesLimit = 2.0;

// K0, K1 from the ascending series (z <= 2).
std::pair<double, double> k01_series(double z) {
  const double y = 0.25 * z * z;
  const double lg = std::log(0.5 * z);
  const double eps = std::numeric_limits<double>::epsilon();

  // term_k = y^k / (k!)^2, psi(k + 1) = -gamma + H_k
  double i0 = 0.0, s0 = 0.0;
  double term = 1.0, harmonic = 0.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term *= y / (double(k) * k);
      harmonic += 1.0 / k;
    }
    i0 += term;
    s0 += term * (harmonic - kEulerGamma);
    if (term < eps * 1e-3 * std::abs(s0) && k > 2) break;
  }
  const double k0 = -lg * i0 + s0;

  // term_k = y^k / (k! (k+1)!)
  double i1 = 0.0, s1 = 0.0;
  term = 1.0;
  double hk = 0.0, hk1 = 1.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term *= y / (double(k) * (k + 1));
      hk += 1.0 / k;
      hk1 += 1.0 / (k + 1);
    }
    i1 += term;
    s1 += term * (hk + hk1 - 2.0 * kEulerGamma);
    if (term < eps * 1e-3 && k > 2) break;
  }
  i1 *= 0.5 * z;
  const double k1 = 1.0 / z + lg * i1 - 0.25 * z * s1;
  return {k0, k1};
}

// exp(z) K0, exp(z) K1 by Steed's continued fraction (Temme's CF2 form, nu = 0).
std::pair<double, double> k01_scaled_cf(double z) {
  const double eps = std::numeric_limits<double>::epsilon();
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i < 100000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 0.5 * eps) break;
  }
  if (i >= 100000) throw InternalError("bessel_k: continued fraction did not converge");
  h *= a1;
  const double k0 = std::sqrt(kPi / (2.0 * z)) / s;
  const double k1 = k0 * (z + 0.5 - h) / z;
  return {k0, k1};
}

void check_args(int nu, double z) {
  if (nu < 0 || nu > 2) throw DomainError("bessel_k: order must be 0, 1 or 2, got " + std::to_string(nu));
  if (!(z > 0.0)) throw DomainError("bessel_k: argument must be positive");
}

double pick(int nu, double k0, double k1, double z) {
  if (nu == 0) return k0;
  if (nu == 1) return k1;
  return k0 + 2.0 * k1 / z;
}

}  // namespace

double bessel_k(int nu, double z) {
  check_args(nu, z);
  if (z <= kSeriesLimit) {
    const auto [k0, k1] = k01_series(z);
    return pick(nu, k0, k1, z);
  }
  const auto [k0, k1] = k01_scaled_cf(z);
  return pick(nu, k0, k1, z) * std::exp(-z);
}

double bessel_k_scaled(int nu, double z) {
  check_args(nu, z);
  if (z <= kSeriesLimit) {
    const auto [k0, k1] = k01_series(z);
    return pick(nu, k0, k1, z) * std::exp(z);
  }
  const auto [k0, k1] = k01_scaled_cf(z);
  return pick(nu, k0, k1, z);
}

}  // namespace histdirac::special
