#include "histdirac/clock_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "histdirac/bessel.hpp"
#include "histdirac/errors.hpp"
#include "histdirac/numerics.hpp"

namespace histdirac::clock {
namespace {

using numerics::QuadratureSpec;
using special::bessel_k_scaled;

void check_velocity(double v) {
  if (!(v >= 0.0 && v < 1.0)) throw DomainError("velocity must satisfy 0 <= v < 1");
}

void check_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + " must be positive and finite");
}

QuadratureSpec spec_for(double rel_tol) {
  QuadratureSpec spec;
  spec.rel_tol = rel_tol;
  spec.abs_tol = 1e-300;
  return spec;
}

template <class F>
double over_p(const ClockSpectrum& s, F&& f, double rel_tol) {
  return numerics::integrate_semi_infinite(f, 0.0, s.scale(), spec_for(rel_tol)).value;
}

}  // namespace

ClockSpectrum::ClockSpectrum(Fn lambda2, double velocity, double mass, double scale, std::string source)
    : lambda2_(std::move(lambda2)), velocity_(velocity), mass_(mass), scale_(scale), source_(std::move(source)) {
  if (!lambda2_) throw DomainError("ClockSpectrum: empty density");
  check_velocity(velocity_);
  check_positive(mass_, "ClockSpectrum mass");
  check_positive(scale_, "ClockSpectrum scale");
}

double ClockSpectrum::p_max(double rel) const {
  double peak = 0.0;
  double last_big = 0.0;
  const double du = 0.05;
  for (double u = du; u < 48.0; u += du) {
    const double p = scale_ * std::sinh(u);
    const double v = (*this)(p);
    peak = std::max(peak, v);
    if (v >= rel * peak) last_big = u;
    if (peak > 0.0 && u - last_big > 2.0) break;
  }
  return scale_ * std::sinh(last_big + du);
}

std::vector<std::pair<double, double>> ClockSpectrum::sample(int n, double p_max) const {
  if (n < 1 || !(p_max > 0.0)) throw DomainError("ClockSpectrum::sample: need n >= 1 and p_max > 0");
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (int i = 1; i <= n; ++i) {
    const double p = p_max * i / n;
    out.emplace_back(p, (*this)(p));
  }
  return out;
}

ClockSpectrum spectrum(const MomentumDistribution& dist, double rel_tol) {
  auto source = std::make_shared<MomentumDistribution>(dist);
  const bool axisym = dist.support().axisymmetric_z;
  auto fn = [source, axisym, rel_tol](double p) {
    QuadratureSpec spec = spec_for(rel_tol);
    const auto r = numerics::integrate_solid_angle(
        [&](const numerics::Vec3& n) { return source->density(p * n); }, spec, axisym);
    return 0.5 * p * r.value;
  };
  const double scale = std::max(dist.support().scale, dist.support().center.norm());
  return ClockSpectrum(fn, 0.0, dist.mass(), scale, "angular quadrature");
}

ClockSpectrum boosted_spectrum(const MomentumDistribution& dist, double v, double rel_tol) {
  check_velocity(v);
  if (v == 0.0) return spectrum(dist, rel_tol);
  const auto boosted = history::boost_distribution(dist, spinor::BoostParams::boost_velocity(v));
  const ClockSpectrum base = spectrum(boosted, rel_tol);
  const double scale = std::max(base.scale(), dist.support().scale);
  return ClockSpectrum([base](double p) { return base(p); }, v, dist.mass(), scale, "angular quadrature");
}

ClockSpectrum proper_spectrum(double eps, double m, double v) {
  check_positive(eps, "eps");
  check_positive(m, "mass");
  check_velocity(v);
  const double z = 0.5 * eps * m;
  const double k1s = bessel_k_scaled(1, z);  // e^z K_1(z)
  const double gamma = 1.0 / std::sqrt(1.0 - v * v);
  auto fn = [=](double p) {
    const double e = std::sqrt(p * p + m * m);
    if (v == 0.0) return eps * p * std::exp(z - 0.5 * eps * e) / (2.0 * m * k1s);
    // e^{-a E} sinh(b p) with a = eps gamma / 2, b = a v, written as a
    // difference of two decaying exponentials shifted by e^z.
    const double a = 0.5 * eps * gamma;
    const double hi = std::exp(z - a * (e - v * p));
    const double lo = std::exp(z - a * (e + v * p));
    return 0.5 * (hi - lo) / (m * gamma * v * k1s);
  };
  const double scale = std::min({m, 2.0 / eps, 2.0 * std::sqrt(m / eps)});
  return ClockSpectrum(fn, v, m, scale, "closed form");
}

double trace(const ClockSpectrum& s, double rel_tol) {
  return over_p(s, [&](double p) { return s(p); }, rel_tol);
}

double energy_trace(const ClockSpectrum& s, double rel_tol) {
  const double m = s.mass();
  return over_p(s, [&](double p) { return s(p) * p / std::sqrt(p * p + m * m); }, rel_tol);
}

double purity(const ClockSpectrum& s, double rel_tol) {
  return over_p(s, [&](double p) { const double l = s(p); return l * l; }, rel_tol);
}

double purity_energy_route(const ClockSpectrum& s, double rel_tol) {
  const double m = s.mass();
  // E = m + k, p(E) = sqrt(k (2m + k)), dp/dE = E / p.
  auto f = [&](double k) {
    if (k <= 0.0) return 0.0;
    const double p = std::sqrt(k * (2.0 * m + k));
    const double l = s(p);
    return l * l * (m + k) / p;
  };
  const double scale = s.scale() * s.scale() / (2.0 * m + s.scale());
  QuadratureSpec spec = spec_for(rel_tol);
  spec.max_subdivisions = 20000;
  return numerics::integrate_semi_infinite(f, 0.0, scale, spec).value;
}

double entropy(const ClockSpectrum& s, double order, double rel_tol) {
  if (!(order > 0.0)) throw DomainError("entropy: order must be positive");
  const double total = trace(s, rel_tol);
  if (!(total > 0.0)) throw DomainError("entropy: spectrum has zero trace");
  if (order == 1.0) {
    return over_p(
        s,
        [&](double p) {
          const double f = s(p) / total;
          return f > 0.0 ? -f * std::log(f) : 0.0;
        },
        rel_tol);
  }
  const double moment = over_p(s, [&](double p) { return std::pow(s(p) / total, order); }, rel_tol);
  return std::log(moment) / (1.0 - order);
}

double binned_purity(const ClockSpectrum& s, double bin_width) {
  check_positive(bin_width, "bin width");
  const double top = s.p_max(1e-14);
  const int bins = static_cast<int>(std::ceil(top / bin_width));
  if (bins > 10000000) throw DomainError("binned_purity: too many bins");
  QuadratureSpec spec = spec_for(1e-10);
  spec.abs_tol = 1e-300;
  std::vector<double> w(bins);
  double sum = 0.0;
  for (int k = 0; k < bins; ++k) {
    w[k] = numerics::integrate([&](double p) { return s(p); }, k * bin_width, (k + 1) * bin_width, spec).value;
    sum += w[k];
  }
  double out = 0.0;
  for (double x : w) out += (x / sum) * (x / sum);
  return out;
}

double proper_trace_closed(double eps, double m) {
  check_positive(eps, "eps");
  check_positive(m, "mass");
  const double z = 0.5 * eps * m;
  return (1.0 + 1.0 / z) / bessel_k_scaled(1, z);
}

double proper_purity_closed(double eps, double m) {
  check_positive(eps, "eps");
  check_positive(m, "mass");
  const double z = eps * m;
  // K_2(z) / K_1(z/2)^2 with both scaled by e^{z}: the exponentials cancel.
  const double k1 = bessel_k_scaled(1, 0.5 * z);
  return eps * bessel_k_scaled(2, z) / (4.0 * k1 * k1);
}

double purity_ratio(double eps, double m, double v) {
  check_positive(eps, "eps");
  check_positive(m, "mass");
  check_velocity(v);
  const double z = eps * m;
  const double k1 = bessel_k_scaled(1, z);
  const double k2 = bessel_k_scaled(2, z);
  if (v * v < 1e-5) return 1.0 - 0.5 * v * v - 0.25 * v * v * z * k1 / k2;
  const double gamma = 1.0 / std::sqrt(1.0 - v * v);
  // K_1(gamma z) / K_1(z) = e^{-(gamma - 1) z} k1(gamma z) / k1(z) in scaled form.
  const double ratio = std::exp(-(gamma - 1.0) * z) * bessel_k_scaled(1, gamma * z) / k1;
  return 2.0 * (gamma - ratio) * k1 / (gamma * gamma * v * v * z * k2);
}

double purity_ratio_numeric(double eps, double m, double v, double rel_tol) {
  check_velocity(v);
  const auto dist = MomentumDistribution::proper(eps, m);
  const double rest = purity(spectrum(dist, 0.1 * rel_tol), rel_tol);
  if (v == 0.0) return 1.0;
  const double moving = purity(boosted_spectrum(dist, v, 0.1 * rel_tol), rel_tol);
  return moving / rest;
}

}  // namespace histdirac::clock
