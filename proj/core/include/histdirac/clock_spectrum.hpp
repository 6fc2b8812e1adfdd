#pragma once

// Reduced clock state rho = integral dp lambda^2(p) |p><p| of a history state
// built from a momentum distribution, with
//   lambda^2(p) = (p / 2) integral dOmega ||a(p n)||^2.
//
// Measures: a Dirac-normalized source gives integral lambda^2 (p / E) dp = 1
// (the energy-measure trace). The plain p-measure trace integral lambda^2 dp is
// reported separately; for the proper distribution it equals
// e^{-z} (1 + 1/z) / K_1(z), z = eps m / 2, which tends to 1 only as eps m -> 0.
//
// Purity is the raw integral of lambda^4 dp. Entropies use the density
// normalized to unit p-measure; they are differential entropies and depend on
// the unit of p (here m = 1 units unless stated otherwise).

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "histdirac/history_state.hpp"

namespace histdirac::clock {

using history::MomentumDistribution;

class ClockSpectrum {
 public:
  using Fn = std::function<double(double)>;

  /// `scale` is the momentum scale used by the integrators.
  ClockSpectrum(Fn lambda2, double velocity, double mass, double scale, std::string source);

  double operator()(double p) const { return p > 0.0 ? lambda2_(p) : 0.0; }
  double velocity() const noexcept { return velocity_; }
  double mass() const noexcept { return mass_; }
  double scale() const noexcept { return scale_; }
  const std::string& source() const noexcept { return source_; }

  /// Smallest sampled p beyond which lambda^2 stays below rel * peak.
  double p_max(double rel = 1e-10) const;
  /// (p, lambda^2) on n uniform points in (0, p_max].
  std::vector<std::pair<double, double>> sample(int n, double p_max) const;

 private:
  Fn lambda2_;
  double velocity_;
  double mass_;
  double scale_;
  std::string source_;
};

/// lambda^2 by angular quadrature. AccuracyError if the angular rule fails.
ClockSpectrum spectrum(const MomentumDistribution& dist, double rel_tol = 1e-12);
/// Spectrum of the distribution seen from a frame moving with velocity v
/// along z. DomainError unless 0 <= v < 1.
ClockSpectrum boosted_spectrum(const MomentumDistribution& dist, double v, double rel_tol = 1e-12);

/// Closed form for the proper distribution:
///   lambda^2(p, v) = e^{-eps gamma E / 2} sinh(eps gamma v p / 2) / (m gamma v K_1(eps m / 2)),
/// and eps p e^{-eps E / 2} / (2 m K_1(eps m / 2)) at v = 0.
ClockSpectrum proper_spectrum(double eps, double m, double v);

/// integral lambda^2 dp.
double trace(const ClockSpectrum& s, double rel_tol = 1e-12);
/// integral lambda^2 (p / E) dp, equal to the Dirac norm of the source.
double energy_trace(const ClockSpectrum& s, double rel_tol = 1e-12);
/// integral lambda^4 dp.
double purity(const ClockSpectrum& s, double rel_tol = 1e-12);
/// The same integral evaluated in the energy variable,
/// integral_m^inf lambda^4(p(E)) (dp / dE) dE.
double purity_energy_route(const ClockSpectrum& s, double rel_tol = 1e-12);
/// Differential entropy of the unit-normalized density: von Neumann for
/// order == 1, Renyi of the given order otherwise (order > 0).
double entropy(const ClockSpectrum& s, double order = 1.0, double rel_tol = 1e-10);
/// Purity of the normalized density binned into cells of width `bin_width`
/// (a bona fide discrete probability vector, so the result lies in (0, 1]).
double binned_purity(const ClockSpectrum& s, double bin_width);

/// e^{-z} (1 + 1/z) / K_1(z), z = eps m / 2: integral lambda^2 dp of the
/// proper distribution at rest.
double proper_trace_closed(double eps, double m);
/// eps K_2(eps m) / (4 K_1(eps m / 2)^2): integral lambda^4 dp at rest.
double proper_purity_closed(double eps, double m);

/// R(v) = 2 (gamma K_1(z) - K_1(gamma z)) / (gamma^2 v^2 z K_2(z)), z = eps m;
/// below v^2 = 1e-5 the series 1 - v^2/2 - (v^2/4) z K_1(z) / K_2(z) is used.
double purity_ratio(double eps, double m, double v);
/// Ratio of purities computed from angular-quadrature spectra of the boosted
/// and unboosted proper distribution.
double purity_ratio_numeric(double eps, double m, double v, double rel_tol = 1e-11);

}  // namespace histdirac::clock
