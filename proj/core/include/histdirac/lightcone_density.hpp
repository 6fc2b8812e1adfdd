#pragma once

// 1+1 dimensional history state with the flat momentum distribution and the
// regulator t -> t - i eps:
//
//   psi_sigma(x, t, eps) = integral dp / (2 E_p) u_sigma(p) e^{-i (t - i eps) E_p + i p x},
//   u(p) = (sqrt(E + m), p / sqrt(E + m)),  gamma^0 = sigma_3,  gamma^1 = i sigma_2.
//
// Densities are psi-bar psi = |psi_0|^2 - |psi_1|^2 and psi^dagger psi taken
// directly from these amplitudes, with no further constants. The eps -> 0+
// limits are therefore
//   invariant:  pi / sqrt(t^2 - x^2) inside the cone, 0 outside;
//   Dirac:      pi |t| / (t^2 - x^2) inside, pi |x| e^{-2 m sqrt(x^2 - t^2)} / (x^2 - t^2) outside.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "histdirac/history_state.hpp"

namespace histdirac::lightcone {

using cplx = std::complex<double>;
using history::MassDistribution;

struct Psi2 {
  cplx psi0{};
  cplx psi1{};
};

enum class QuadraturePath {
  automatic,  ///< contour for eps < 0.05, real axis otherwise
  real_axis,  ///< the defining integral over real p
  contour,    ///< p = m sinh(u) on a deformed steepest-descent path
};

struct PsiQuadratureOptions {
  double rel_tol = 1e-13;
  int max_subdivisions = 4000;
  QuadraturePath path = QuadraturePath::automatic;
};

/// Numerical value of the defining integral; eps > 0 required (DomainError).
/// AccuracyError when the tolerance cannot be met.
Psi2 psi_quadrature(double x, double t, double eps, double m, const PsiQuadratureOptions& opts = {});

/// Closed form with w = sqrt(x^2 - (t - i eps)^2) as one principal-branch call:
///   psi_0 = sqrt(2 pi) sqrt(w + i (t - i eps)) e^{-m w} / (2 w)
///   psi_1 = sqrt(2 pi) i x e^{-m w} / (2 w sqrt(w + i (t - i eps)))
/// eps = 0 is allowed off the light cone (signed zero selects the side);
/// on the cone it raises SingularityError.
Psi2 psi_closed(double x, double t, double eps, double m);

/// F = |psi_0 / psi_1|^2 in the (f, gamma) form; independent of m.
/// +infinity at x = 0.
double F_ratio(double x, double t, double eps);

/// eps -> 0+ limits. SingularityError on the cone.
double invariant_density(double x, double t);
double dirac_density(double x, double t, double m);
/// psi-bar_{m'} psi_m = (pi / s) e^{-i sgn(t) (m - m') s}, s = sqrt(t^2 - x^2); 0 outside the cone.
cplx cross_mass_density(double x, double t, double m, double m_prime);
/// (pi / s) |Phi(tau - sgn(t) s)|^2 inside the cone, exactly 0 outside.
double tau_density(double x, double t, double tau, const MassDistribution& masses);

/// psi-bar psi and psi^dagger psi at finite eps from the closed forms.
double regularized_invariant_density(double x, double t, double eps, double m);
double regularized_dirac_density(double x, double t, double eps, double m);
/// Psi-bar Psi of Psi = integral dm phi(m) e^{i m tau} psi_m(x, t, eps).
double regularized_tau_density(double x, double t, double tau, double eps, const MassDistribution& masses);

/// Full width at half maximum of psi-bar psi at t = 0.
double localization_width(double eps, double m);

struct ContinuityReport {
  double max_residual = 0.0;  ///< max |d_t j0 + d_x j1 + d_tau (psi-bar psi)|
  double scale = 0.0;         ///< max of the individual terms
  double rms_residual = 0.0;
  double relative() const { return scale > 0.0 ? max_residual / scale : max_residual; }
};

/// Central-difference check of d_mu j^mu = -d_tau (psi-bar psi) for a sharp
/// mass superposition on the given (x, t) points at clock value tau.
ContinuityReport continuity_residual(const MassDistribution& masses, double eps, double tau,
                                     const std::vector<double>& xs, const std::vector<double>& ts,
                                     double step = 1e-3);

// ---------------------------------------------------------------------------
// Grids

enum class DensityKind { invariant, dirac, cross_mass, tau };
std::string to_string(DensityKind kind);

enum class DensityMethod {
  limit,       ///< eps -> 0+ closed forms (eps ignored)
  closed,      ///< closed forms at finite eps
  quadrature,  ///< psi_quadrature at finite eps
};
std::string to_string(DensityMethod method);

struct GridAxis {
  double start = 0.0;
  double step = 1.0;
  int count = 1;
  double at(int i) const { return start + step * i; }
};

struct DensityParams {
  DensityKind kind = DensityKind::invariant;
  DensityMethod method = DensityMethod::limit;
  double m = 1.0;
  double m_prime = 1.0;
  double eps = 0.0;
  double tau = 0.0;
  const MassDistribution* masses = nullptr;  ///< required for DensityKind::tau
};

struct DensityGrid {
  DensityParams params;
  GridAxis x;
  GridAxis t;
  std::vector<double> re;  ///< x-major: index i * t.count + j
  std::vector<double> im;  ///< imaginary parts (cross_mass only, else empty)
  double value(int i, int j) const { return re[std::size_t(i) * t.count + j]; }
};

/// Evaluates the requested density at every grid point. SingularityError if
/// a limit-method grid touches the light cone.
DensityGrid make_density_grid(const DensityParams& params, const GridAxis& x, const GridAxis& t);

}  // namespace histdirac::lightcone
