#pragma once

// Shared numerical substrate: adaptive Gauss-Kronrod quadrature, semi-infinite
// transforms, solid-angle and ball integrals, bracketed root finding and
// Gauss-Hermite rules.
//
// The adaptive driver is deterministic: intervals are refined in order of
// decreasing error estimate (ties broken by position) and the final sum runs
// over intervals sorted by their left endpoint, so identical inputs give
// bit-identical results.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "histdirac/errors.hpp"

namespace histdirac::numerics {

using Vec3 = Eigen::Vector3d;

enum class Transform {
  none,  ///< Semi-infinite range cut into equal chunks of length `scale`.
  sinh,  ///< p = a + scale * sinh(u), unit chunks in u.
};

struct QuadratureSpec {
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  int max_subdivisions = 4000;
  Transform transform = Transform::sinh;
};

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  long evaluations = 0;
  int subdivisions = 0;
  /// Upper end actually integrated for semi-infinite ranges (+inf otherwise).
  double cutoff = std::numeric_limits<double>::infinity();
};

namespace detail {

// 21-point Kronrod rule with its embedded 10-point Gauss rule on [-1, 1].
// Non-negative abscissae, index 0 is the centre node.
struct Gk21 {
  static const std::vector<double>& abscissae();
  static const std::vector<double>& kronrod_weights();
  // Gauss weights for odd-indexed abscissae (abscissa 2i+1 -> weight i).
  static const std::vector<double>& gauss_weights();
};

template <class T, class = void>
struct plain {
  using type = T;
};
template <class T>
struct plain<T, std::void_t<typename T::PlainObject>> {
  using type = typename T::PlainObject;
};
// Integrand value type with Eigen expression templates evaluated.
template <class T>
using plain_t = typename plain<std::decay_t<T>>::type;

template <class T>
T zero() {
  if constexpr (std::is_base_of_v<Eigen::MatrixBase<T>, T>) {
    return T::Zero();
  } else {
    return T{};
  }
}

template <class T>
double magnitude(const T& v) {
  if constexpr (std::is_base_of_v<Eigen::MatrixBase<T>, T>) {
    return v.cwiseAbs().maxCoeff();
  } else {
    using std::abs;
    return static_cast<double>(abs(v));
  }
}

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

template <class F>
auto gk21_panel(F& f, double a, double b) {
  using T = detail::plain_t<decltype(f(a))>;
  const auto& x = Gk21::abscissae();
  const auto& wk = Gk21::kronrod_weights();
  const auto& wg = Gk21::gauss_weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * wk[0];
  T gauss = zero<T>();
  for (std::size_t i = 1; i < x.size(); ++i) {
    const T fp = f(c + h * x[i]);
    const T fm = f(c - h * x[i]);
    const T sum = fp + fm;
    kronrod += sum * wk[i];
    if (i % 2 == 1) gauss += sum * wg[i / 2];
  }
  kronrod *= h;
  gauss *= h;
  const double err = std::max(magnitude(kronrod - gauss),
                              50.0 * std::numeric_limits<double>::epsilon() * magnitude(kronrod));
  return Panel<T>{a, b, kronrod, err};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (21 point) integral of f over [a, b].
///
/// Throws AccuracyError carrying the best estimate when the tolerance
/// max(abs_tol, rel_tol*|I|) is not met within max_subdivisions.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  using T = detail::plain_t<decltype(f(a))>;
  using detail::Panel;
  QuadratureResult<T> out;
  out.value = detail::zero<T>();
  if (a == b) return out;
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw DomainError("integrate: finite limits required; use integrate_semi_infinite");
  }
  auto order = [](const Panel<T>& l, const Panel<T>& r) {
    if (l.error != r.error) return l.error < r.error;
    return l.a > r.a;
  };
  std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(order)> queue(order);
  std::vector<Panel<T>> done;
  auto first = detail::gk21_panel(f, a, b);
  out.evaluations = 21;
  T total = first.value;
  double total_err = first.error;
  queue.push(first);
  int splits = 0;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(total)); };
  while (!queue.empty() && total_err > tolerance()) {
    if (splits >= spec.max_subdivisions) break;
    Panel<T> worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(std::abs(worst.a), std::abs(worst.b))) {
      // Cannot split further; freeze this panel.
      queue.pop();
      done.push_back(worst);
      continue;
    }
    queue.pop();
    auto left = detail::gk21_panel(f, worst.a, mid);
    auto right = detail::gk21_panel(f, mid, worst.b);
    out.evaluations += 42;
    ++splits;
    total += (left.value + right.value) - worst.value;
    total_err += (left.error + right.error) - worst.error;
    queue.push(left);
    queue.push(right);
  }
  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel<T>& l, const Panel<T>& r) { return l.a < r.a; });
  T sum = detail::zero<T>();
  double err = 0.0;
  for (const auto& p : done) {
    sum += p.value;
    err += p.error;
  }
  out.value = sum;
  out.error = err;
  out.subdivisions = splits;
  if (!(err <= std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(sum))) ||
      !std::isfinite(detail::magnitude(sum))) {
    throw AccuracyError("integrate: tolerance not reached on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "] after " + std::to_string(splits) +
                            " subdivisions",
                        detail::magnitude(sum), err);
  }
  return out;
}

/// Integral of f over [a, inf).
///
/// With Transform::sinh the substitution p = a + scale*sinh(u) is applied and
/// unit chunks in u are added until two consecutive chunks contribute less
/// than the tolerance; with Transform::none chunks of length `scale` in p are
/// used. A range that keeps contributing (divergent or heavy tail) raises
/// AccuracyError. `cutoff` reports the p actually reached.
template <class F>
auto integrate_semi_infinite(F&& f, double a, double scale, const QuadratureSpec& spec = {}) {
  using T = detail::plain_t<decltype(f(a))>;
  if (!(scale > 0.0)) throw DomainError("integrate_semi_infinite: scale must be positive");
  QuadratureResult<T> out;
  T total = detail::zero<T>();
  double err = 0.0;
  int quiet_chunks = 0;
  const int max_chunks = spec.transform == Transform::sinh ? 48 : 200000;
  const int min_chunks = spec.transform == Transform::sinh ? 4 : 2;
  int k = 0;
  double last_chunk = 0.0;
  QuadratureSpec inner = spec;
  inner.transform = Transform::none;
  for (; k < max_chunks; ++k) {
    QuadratureResult<T> piece;
    if (spec.transform == Transform::sinh) {
      auto g = [&](double u) -> T { return f(a + scale * std::sinh(u)) * (scale * std::cosh(u)); };
      piece = integrate(g, double(k), double(k + 1), inner);
    } else {
      piece = integrate(f, a + k * scale, a + (k + 1) * scale, inner);
    }
    total += piece.value;
    err += piece.error;
    out.evaluations += piece.evaluations;
    out.subdivisions += piece.subdivisions + 1;
    last_chunk = detail::magnitude(piece.value);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(total));
    quiet_chunks = (last_chunk <= 0.01 * tol) ? quiet_chunks + 1 : 0;
    if (quiet_chunks >= 2 && k + 1 >= min_chunks) {
      ++k;
      break;
    }
  }
  out.cutoff = spec.transform == Transform::sinh ? a + scale * std::sinh(double(k)) : a + k * scale;
  out.value = total;
  out.error = err + last_chunk;
  if (quiet_chunks < 2) {
    throw AccuracyError("integrate_semi_infinite: integrand tail does not decay (divergent or "
                        "cutoff-dominated)",
                        detail::magnitude(total), out.error);
  }
  return out;
}

/// Periodic trapezoid rule in the azimuth, doubled until converged.
template <class F>
auto integrate_periodic(F&& f, double rel_tol, double abs_tol, int max_points = 4096) {
  using T = detail::plain_t<decltype(f(0.0))>;
  constexpr double two_pi = 6.283185307179586476925286766559;
  int n = 8;
  T sum = detail::zero<T>();
  for (int i = 0; i < n; ++i) sum += f(two_pi * i / n);
  T estimate = sum * (two_pi / n);
  while (n < max_points) {
    T extra = detail::zero<T>();
    for (int i = 0; i < n; ++i) extra += f(two_pi * (i + 0.5) / n);
    sum += extra;
    n *= 2;
    const T refined = sum * (two_pi / n);
    const double change = detail::magnitude(refined - estimate);
    estimate = refined;
    if (change <= std::max(abs_tol, rel_tol * detail::magnitude(refined))) return estimate;
  }
  throw AccuracyError("integrate_periodic: azimuthal rule did not converge",
                      detail::magnitude(estimate), 0.0);
}

/// Integral of f(n) over the unit sphere, n = (sin t cos phi, sin t sin phi, cos t).
/// Adaptive Gauss-Kronrod in cos t, periodic trapezoid in phi. When
/// `axisymmetric` is set the integrand is assumed independent of phi.
template <class F>
auto integrate_solid_angle(F&& f, const QuadratureSpec& spec = {}, bool axisymmetric = false) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  using T = detail::plain_t<decltype(f(Vec3()))>;
  auto polar = [&](double c) -> T {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (axisymmetric) return f(Vec3(s, 0.0, c)) * two_pi;
    return integrate_periodic(
        [&](double phi) { return f(Vec3(s * std::cos(phi), s * std::sin(phi), c)); },
        0.1 * spec.rel_tol, 0.1 * spec.abs_tol);
  };
  return integrate(polar, -1.0, 1.0, spec);
}

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

namespace detail {

// Fixed product rule (r = scale sinh u, u in [0, 7]) giving the order of
// magnitude of a ball integral; used to turn the relative tolerance into an
// absolute one for the outer shells.
template <class F>
double rough_ball_magnitude(F& f, const Vec3& center, double scale) {
  static const GaussRule radial = gauss_legendre(48);
  static const GaussRule polar = gauss_legendre(16);
  constexpr double two_pi = 6.283185307179586476925286766559;
  constexpr int n_phi = 16;
  constexpr double u_max = 7.0;
  double total = 0.0;
  for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
    const double u = 0.5 * u_max * (radial.nodes[a] + 1.0);
    const double r = scale * std::sinh(u);
    const double jac = 0.5 * u_max * radial.weights[a] * scale * std::cosh(u) * r * r;
    for (std::size_t b = 0; b < polar.nodes.size(); ++b) {
      const double c = polar.nodes[b];
      const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int k = 0; k < n_phi; ++k) {
        const double phi = two_pi * k / n_phi;
        const Vec3 n(sn * std::cos(phi), sn * std::sin(phi), c);
        total += jac * polar.weights[b] * (two_pi / n_phi) * magnitude(f(Vec3(center + r * n)));
      }
    }
  }
  return total;
}

}  // namespace detail

/// Integral of f(p) d^3p over R^3 in spherical coordinates around `center`.
/// The radial range is mapped with r = scale*sinh(u). Each angular shell is
/// resolved to rel_tol relative to its own value or to an absolute share of
/// the rough total, whichever is looser, so that negligible outer shells do
/// not demand full relative accuracy.
template <class F>
auto integrate_ball(F&& f, const Vec3& center, double scale, const QuadratureSpec& spec = {},
                    bool axisymmetric = false) {
  const double rough = detail::rough_ball_magnitude(f, center, scale);
  using T = detail::plain_t<decltype(f(center))>;
  auto radial = [&](double r) -> T {
    if (r == 0.0) return detail::zero<T>();
    QuadratureSpec angular = spec;
    angular.rel_tol = 0.1 * spec.rel_tol;
    // Shell error budget e(r) with integral e(r) r^2 dr <= 0.01 rel_tol rough.
    const double x = r / scale;
    angular.abs_tol = std::max(spec.abs_tol, 0.01 * spec.rel_tol * rough / (scale * (1.0 + x * x) * r * r));
    auto shell = integrate_solid_angle([&](const Vec3& n) { return f(Vec3(center + r * n)); },
                                       angular, axisymmetric);
    return T(shell.value * (r * r));
  };
  QuadratureSpec outer = spec;
  outer.transform = Transform::sinh;
  return integrate_semi_infinite(radial, 0.0, scale, outer);
}

/// Root of f on [lo, hi] to absolute tolerance `tol` in x.
///
/// Returns nullopt when f has no sign change on the bracket. A bracket with
/// lo >= hi is rejected with DomainError.
std::optional<double> find_root(const std::function<double(double)>& f, double lo, double hi,
                                double tol = 1e-12, int max_iterations = 200);

/// Gauss-Hermite rule for the weight exp(-x^2) (Golub-Welsch).
GaussRule gauss_hermite(int n);

}  // namespace histdirac::numerics
