#include "histdirac/lightcone_density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "histdirac/errors.hpp"
#include "histdirac/numerics.hpp"

namespace histdirac::lightcone {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

using Vec2c = Eigen::Vector2cd;
using numerics::QuadratureSpec;

void check_mass(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("mass must be positive and finite");
}

void check_off_cone(double x, double t, const char* what) {
  if (std::abs(x) == std::abs(t)) {
    throw SingularityError(std::string(what) + ": point lies on the light cone |x| = |t|");
  }
}

// Defining integral folded onto p >= 0.
Psi2 psi_real_axis(double x, double t, double eps, double m, const PsiQuadratureOptions& opts) {
  const double e_max = m + 45.0 / eps;
  const double p_max = std::sqrt(e_max * e_max - m * m);
  const double freq = std::abs(x) + std::abs(t);
  const double len = freq > 0.0 ? std::min(4.0, kPi / freq) : 4.0;
  const int chunks = static_cast<int>(std::ceil(p_max / len));
  QuadratureSpec spec;
  spec.rel_tol = opts.rel_tol;
  spec.abs_tol = 1e-17 * len;
  spec.max_subdivisions = opts.max_subdivisions;
  spec.transform = numerics::Transform::none;
  auto integrand = [&](double p) {
    const double e = std::sqrt(p * p + m * m);
    const double r = std::sqrt(e + m);
    const cplx phase = std::exp(cplx(-eps * e, -t * e));
    Vec2c v;
    v[0] = (r / (2.0 * e)) * 2.0 * std::cos(p * x) * phase;
    v[1] = (p / (2.0 * e * r)) * cplx(0.0, 2.0 * std::sin(p * x)) * phase;
    return v;
  };
  Vec2c total = Vec2c::Zero();
  for (int k = 0; k < chunks; ++k) {
    total += numerics::integrate(integrand, k * len, (k + 1) * len, spec).value;
  }
  return {total[0], total[1]};
}

// p = m sinh(u) with u = v + i theta(v); theta interpolates between the
// steepest-descent directions at v -> -inf and v -> +inf.
Psi2 psi_contour(double x, double t, double eps, double m, const PsiQuadratureOptions& opts) {
  const cplx tau(t, -eps);
  const double alpha_plus = std::arg(cplx(x - t, eps));
  const double alpha_minus = std::arg(cplx(x + t, -eps));
  const double theta_plus = 0.5 * kPi - alpha_plus;
  const double theta_minus = alpha_minus + 0.5 * kPi;
  const double center = std::atanh(cplx(x, 0.0) / tau).real();
  const double dtheta = theta_plus - theta_minus;

  auto integrand = [&](double v) -> Vec2c {
    const double s = v - center;
    const double th = theta_minus + 0.5 * dtheta * (1.0 + std::tanh(s));
    const double sech = 1.0 / std::cosh(s);
    const cplx du(1.0, 0.5 * dtheta * sech * sech);
    const cplx u(v, th);
    const cplx ch = std::cosh(u);
    const cplx sh = std::sinh(u);
    const cplx exponent = cplx(0.0, m) * (x * sh - tau * ch);
    if (exponent.real() < -700.0 || !std::isfinite(exponent.real())) return Vec2c::Zero();
    const cplx r = std::sqrt(m * (ch + 1.0));
    const cplx w = 0.5 * std::exp(exponent) * du;
    Vec2c out;
    out[0] = w * r;
    out[1] = w * (m * sh / r);
    return out;
  };
  QuadratureSpec spec;
  spec.rel_tol = opts.rel_tol;
  spec.abs_tol = 1e-300;
  spec.max_subdivisions = opts.max_subdivisions;
  spec.transform = numerics::Transform::none;
  const auto right = numerics::integrate_semi_infinite(integrand, center, 1.0, spec);
  const auto left = numerics::integrate_semi_infinite([&](double s) { return integrand(2.0 * center - s); },
                                                      center, 1.0, spec);
  const Vec2c total = right.value + left.value;
  return {total[0], total[1]};
}

}  // namespace

Psi2 psi_quadrature(double x, double t, double eps, double m, const PsiQuadratureOptions& opts) {
  check_mass(m);
  if (!(eps > 0.0)) throw DomainError("psi_quadrature: eps must be positive");
  QuadraturePath path = opts.path;
  if (path == QuadraturePath::automatic) path = eps < 0.05 ? QuadraturePath::contour : QuadraturePath::real_axis;
  return path == QuadraturePath::contour ? psi_contour(x, t, eps, m, opts) : psi_real_axis(x, t, eps, m, opts);
}

Psi2 psi_closed(double x, double t, double eps, double m) {
  check_mass(m);
  if (!(eps >= 0.0)) throw DomainError("psi_closed: eps must be non-negative");
  if (eps == 0.0) check_off_cone(x, t, "psi_closed");
  // x^2 - (t - i eps)^2, with the imaginary part written out so that its
  // sign survives eps = 0 as a signed zero.
  const cplx w = std::sqrt(cplx(x * x - t * t + eps * eps, 2.0 * eps * t));
  const cplx root = std::sqrt(w + cplx(eps, t));
  const cplx common = kSqrt2Pi * std::exp(-m * w) / (2.0 * w);
  return {common * root, common * cplx(0.0, x) / root};
}

double F_ratio(double x, double t, double eps) {
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  const double a = x * x - eps * eps - t * t;
  const double f = std::sqrt(a * a + 4.0 * x * x * eps * eps);
  const double gamma = std::arg(cplx(x * x + eps * eps - t * t, 2.0 * eps * t));
  const double num = 2.0 * std::sqrt(f) * (t * std::sin(0.5 * gamma) + eps * std::cos(0.5 * gamma)) + f - a;
  return 1.0 + num / (x * x);
}

double invariant_density(double x, double t) {
  check_off_cone(x, t, "invariant_density");
  if (x * x > t * t) return 0.0;
  return kPi / std::sqrt(t * t - x * x);
}

double dirac_density(double x, double t, double m) {
  check_mass(m);
  check_off_cone(x, t, "dirac_density");
  const double d = t * t - x * x;
  if (d > 0.0) return kPi * std::abs(t) / d;
  return kPi * std::abs(x) * std::exp(-2.0 * m * std::sqrt(-d)) / (-d);
}

cplx cross_mass_density(double x, double t, double m, double m_prime) {
  check_mass(m);
  check_mass(m_prime);
  check_off_cone(x, t, "cross_mass_density");
  if (x * x > t * t) return {};
  const double s = std::sqrt(t * t - x * x);
  const double sign = t > 0.0 ? 1.0 : -1.0;
  return (kPi / s) * std::exp(cplx(0.0, -sign * (m - m_prime) * s));
}

double tau_density(double x, double t, double tau, const MassDistribution& masses) {
  check_off_cone(x, t, "tau_density");
  if (x * x > t * t) return 0.0;
  const double s = std::sqrt(t * t - x * x);
  const double sign = t > 0.0 ? 1.0 : -1.0;
  return (kPi / s) * std::norm(masses.transform(tau - sign * s));
}

double regularized_invariant_density(double x, double t, double eps, double m) {
  const Psi2 p = psi_closed(x, t, eps, m);
  return std::norm(p.psi0) - std::norm(p.psi1);
}

double regularized_dirac_density(double x, double t, double eps, double m) {
  const Psi2 p = psi_closed(x, t, eps, m);
  return std::norm(p.psi0) + std::norm(p.psi1);
}

namespace {

Vec2c superposed_psi(double x, double t, double tau, double eps, const MassDistribution& masses) {
  auto at = [&](double m) {
    const Psi2 p = psi_closed(x, t, eps, m);
    return Vec2c(p.psi0, p.psi1);
  };
  if (masses.is_sharp()) {
    Vec2c sum = Vec2c::Zero();
    for (const auto& [m, c] : masses.components()) sum += c * std::exp(cplx(0.0, m * tau)) * at(m);
    return sum;
  }
  if (!(masses.lower() > 0.0)) throw DomainError("mass superposition must have support in m > 0");
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-15;
  spec.max_subdivisions = 20000;
  return numerics::integrate(
             [&](double m) -> Vec2c { return masses.phi(m) * std::exp(cplx(0.0, m * tau)) * at(m); },
             masses.lower(), masses.upper(), spec)
      .value;
}

}  // namespace

double regularized_tau_density(double x, double t, double tau, double eps, const MassDistribution& masses) {
  const Vec2c psi = superposed_psi(x, t, tau, eps, masses);
  return std::norm(psi[0]) - std::norm(psi[1]);
}

double localization_width(double eps, double m) {
  check_mass(m);
  if (!(eps > 0.0)) throw DomainError("localization_width: eps must be positive");
  const double peak = regularized_invariant_density(0.0, 0.0, eps, m);
  auto g = [&](double x) { return regularized_invariant_density(x, 0.0, eps, m) - 0.5 * peak; };
  double hi = eps;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw InternalError("localization_width: half maximum not bracketed");
  }
  const auto root = numerics::find_root(g, 0.0, hi, 1e-14 * hi);
  if (!root) throw InternalError("localization_width: half maximum not bracketed");
  return 2.0 * *root;
}

ContinuityReport continuity_residual(const MassDistribution& masses, double eps, double tau,
                                     const std::vector<double>& xs, const std::vector<double>& ts,
                                     double step) {
  if (!masses.is_sharp()) throw DomainError("continuity_residual: sharp mass superposition required");
  if (!(step > 0.0)) throw DomainError("continuity_residual: step must be positive");
  auto psi = [&](double x, double t, double ta) { return superposed_psi(x, t, ta, eps, masses); };
  auto j0 = [&](double x, double t) { return psi(x, t, tau).squaredNorm(); };
  auto j1 = [&](double x, double t) {
    const Vec2c v = psi(x, t, tau);
    return 2.0 * (std::conj(v[0]) * v[1]).real();
  };
  auto scalar = [&](double x, double t, double ta) {
    const Vec2c v = psi(x, t, ta);
    return std::norm(v[0]) - std::norm(v[1]);
  };
  ContinuityReport rep;
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    for (double t : ts) {
      const double dt = (j0(x, t + step) - j0(x, t - step)) / (2.0 * step);
      const double dx = (j1(x + step, t) - j1(x - step, t)) / (2.0 * step);
      const double dtau = (scalar(x, t, tau + step) - scalar(x, t, tau - step)) / (2.0 * step);
      const double r = dt + dx + dtau;
      rep.max_residual = std::max(rep.max_residual, std::abs(r));
      rep.scale = std::max({rep.scale, std::abs(dt), std::abs(dx), std::abs(dtau)});
      sum_sq += r * r;
      ++n;
    }
  }
  rep.rms_residual = n ? std::sqrt(sum_sq / double(n)) : 0.0;
  return rep;
}

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::invariant: return "invariant";
    case DensityKind::dirac: return "dirac";
    case DensityKind::cross_mass: return "cross_mass";
    case DensityKind::tau: return "tau";
  }
  return "unknown";
}

std::string to_string(DensityMethod method) {
  switch (method) {
    case DensityMethod::limit: return "limit";
    case DensityMethod::closed: return "closed";
    case DensityMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

DensityGrid make_density_grid(const DensityParams& params, const GridAxis& x, const GridAxis& t) {
  if (x.count < 1 || t.count < 1) throw DomainError("density grid: empty axis");
  if (params.method != DensityMethod::limit && !(params.eps > 0.0)) {
    throw DomainError("density grid: finite-eps methods need eps > 0");
  }
  if (params.kind == DensityKind::tau && params.masses == nullptr) {
    throw DomainError("density grid: tau density needs a mass distribution");
  }
  if (params.kind == DensityKind::tau && params.method == DensityMethod::quadrature) {
    throw DomainError("density grid: tau density supports the limit and closed methods only");
  }
  DensityGrid g;
  g.params = params;
  g.x = x;
  g.t = t;
  g.re.resize(std::size_t(x.count) * t.count);
  if (params.kind == DensityKind::cross_mass) g.im.resize(g.re.size());

  auto amplitudes = [&](double xi, double tj, double m) {
    return params.method == DensityMethod::closed ? psi_closed(xi, tj, params.eps, m)
                                                  : psi_quadrature(xi, tj, params.eps, m);
  };
  // Rows are independent; workers pull x indices from a shared counter.
  auto row = [&](int i) {
    for (int j = 0; j < t.count; ++j) {
      const double xi = x.at(i), tj = t.at(j);
      const std::size_t idx = std::size_t(i) * t.count + j;
      cplx v;
      if (params.method == DensityMethod::limit) {
        switch (params.kind) {
          case DensityKind::invariant: v = invariant_density(xi, tj); break;
          case DensityKind::dirac: v = dirac_density(xi, tj, params.m); break;
          case DensityKind::cross_mass: v = cross_mass_density(xi, tj, params.m, params.m_prime); break;
          case DensityKind::tau: v = tau_density(xi, tj, params.tau, *params.masses); break;
        }
      } else if (params.kind == DensityKind::tau) {
        v = regularized_tau_density(xi, tj, params.tau, params.eps, *params.masses);
      } else {
        const Psi2 a = amplitudes(xi, tj, params.m);
        switch (params.kind) {
          case DensityKind::invariant: v = std::norm(a.psi0) - std::norm(a.psi1); break;
          case DensityKind::dirac: v = std::norm(a.psi0) + std::norm(a.psi1); break;
          case DensityKind::cross_mass: {
            const Psi2 b = amplitudes(xi, tj, params.m_prime);
            v = std::conj(b.psi0) * a.psi0 - std::conj(b.psi1) * a.psi1;
            break;
          }
          case DensityKind::tau: break;
        }
      }
      g.re[idx] = v.real();
      if (!g.im.empty()) g.im[idx] = v.imag();
    }
  };
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < x.count; i = next++) {
      try {
        row(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = x.count;
      }
    }
  };
  const int threads = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, std::max(1, x.count));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return g;
}

}  // namespace histdirac::lightcone
