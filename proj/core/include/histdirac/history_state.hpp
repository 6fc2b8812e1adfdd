#pragma once

// Momentum-space history states of a free Dirac particle of positive mass.
//
// Normalization bookkeeping (all 2*pi factors live here):
//   * a state on the mass shell m is given by two spin amplitudes a_s(p);
//     its invariant product with a state of mass m' is delta(m - m') times
//       N = integral d^3p / (2 E_p) ||a(p)||^2           (dirac_norm)
//     and only that coefficient is ever computed;
//   * the wavefunction conditioned on clock time t is
//       psi(x, t) = (2 pi)^{-3/2} integral d^3p / (2 E_p) u^s(p) a_s(p) e^{-i E_p t + i p.x},
//     so that integral d^3x psi^dagger psi = N;
//   * the clock projector <Psi-bar| |t><t| (x) gamma^0 |Psi> equals N / (2 pi);
//     dividing by it is what makes conditioned states unit normalized, and
//     WavefunctionGrid therefore stores psi with the 1/(2 pi) already removed.

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "histdirac/numerics.hpp"
#include "histdirac/spinor_algebra.hpp"

namespace histdirac::history {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Amplitudes = std::array<cplx, 2>;
using spinor::BoostParams;
using spinor::FourVector;
using spinor::Mat4c;

/// Regular momentum grid used for grid-sampled distributions.
struct MomentumGrid {
  Vec3 origin = Vec3::Zero();  ///< Momentum of sample (0, 0, 0).
  Vec3 spacing = Vec3::Ones();
  std::array<int, 3> counts{2, 2, 2};

  std::size_t size() const { return std::size_t(counts[0]) * counts[1] * counts[2]; }
  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(counts[0]) * (std::size_t(j) + std::size_t(counts[1]) * k);
  }
  Vec3 point(int i, int j, int k) const {
    return origin + Vec3(i * spacing[0], j * spacing[1], k * spacing[2]);
  }
  /// Largest |p| inside the grid box.
  double p_max() const;
};

/// Hints for the quadrature that integrates a distribution over R^3.
struct Support {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;
  /// Density depends only on (p_z, |p_perp|) and center lies on the z axis.
  bool axisymmetric_z = false;
};

class MomentumDistribution {
 public:
  using AmplitudeFn = std::function<Amplitudes(const Vec3&)>;
  using DensityFn = std::function<double(const Vec3&)>;

  /// `density` defaults to ||amplitude(p)||^2.
  MomentumDistribution(double mass, AmplitudeFn amplitude, Support support,
                       DensityFn density = {});

  /// ||a(p)||^2 = eps / (4 pi m K_1(eps m / 2)) exp(-eps E_p / 2), spin along `spin`.
  static MomentumDistribution proper(double eps, double mass, Amplitudes spin = {1.0, 0.0});

  /// a(p) = c exp(-|p - center|^2 / (4 width^2)) spin; with `normalize` the
  /// constant c is chosen so that dirac_norm == 1 (by quadrature).
  static MomentumDistribution gaussian(double mass, const Vec3& center, double width,
                                       Amplitudes spin = {1.0, 0.0}, bool normalize = true);

  /// Samples on `grid`, trilinear interpolation, zero outside the box.
  static MomentumDistribution from_grid(double mass, const MomentumGrid& grid,
                                        std::vector<Amplitudes> samples);

  double mass() const noexcept { return mass_; }
  Amplitudes amplitude(const Vec3& p) const { return amplitude_(p); }
  double density(const Vec3& p) const { return density_(p); }
  const Support& support() const noexcept { return support_; }

  bool is_grid() const noexcept { return grid_ != nullptr; }
  const MomentumGrid* grid() const noexcept { return grid_ ? &grid_->grid : nullptr; }
  const std::vector<Amplitudes>* samples() const noexcept {
    return grid_ ? &grid_->samples : nullptr;
  }
  /// Bound on the trilinear interpolation error of the amplitudes,
  /// max over cells of |second difference| / 8 (zero for closed forms).
  double interpolation_error_estimate() const;

  /// Amplitudes multiplied by c.
  MomentumDistribution scaled(cplx c) const;

 private:
  struct GridData {
    MomentumGrid grid;
    std::vector<Amplitudes> samples;
  };

  double mass_;
  AmplitudeFn amplitude_;
  DensityFn density_;
  Support support_;
  std::shared_ptr<const GridData> grid_;
};

/// Mass distribution phi(m) of the second (tau) clock: a finite set of sharp
/// masses with complex weights, or a continuous function on [lower, upper].
class MassDistribution {
 public:
  using Fn = std::function<cplx(double)>;

  static MassDistribution sharp(std::vector<std::pair<double, cplx>> components);
  static MassDistribution continuous(Fn phi, double lower, double upper);
  /// |phi|^2 Gaussian with mean `mean` and standard deviation `sigma`,
  /// truncated to mean +- cut*sigma.
  static MassDistribution gaussian(double mean, double sigma, double cut = 10.0);

  bool is_sharp() const noexcept { return !phi_; }
  const std::vector<std::pair<double, cplx>>& components() const noexcept { return components_; }
  cplx phi(double m) const;
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

  /// Phi(tau) = integral dm phi(m) e^{i m tau} (sum over components when
  /// sharp). Memoized per tau.
  cplx transform(double tau) const;

 private:
  MassDistribution() = default;

  std::vector<std::pair<double, cplx>> components_;
  Fn phi_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  struct Cache {
    std::mutex mutex;
    std::map<double, cplx> values;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct NormReport {
  double value = 0.0;
  double error = 0.0;
  double cutoff = 0.0;  ///< Radius beyond which the tail is below tolerance.
};

/// integral d^3p / (2 E_p) ||a(p)||^2. AccuracyError when the integral does
/// not converge (divergent or cutoff-dominated).
double dirac_norm(const MomentumDistribution& dist, double rel_tol = 1e-11);
NormReport dirac_norm_report(const MomentumDistribution& dist, double rel_tol = 1e-11);

struct OverlapResult {
  cplx coefficient{};     ///< Coefficient of delta(m - m').
  bool mass_mismatch = false;
};

/// integral d^3p / (2 E_p) a_1^dagger(p) a_2(p). Distinct masses give an
/// exact zero with `mass_mismatch` set.
OverlapResult invariant_overlap_coefficient(const MomentumDistribution& a,
                                            const MomentumDistribution& b,
                                            double rel_tol = 1e-10);

/// Spin rotation D_{s' s}(p) = u^{s' dagger}(p) S(Lambda) u^s(Lambda^{-1} p) / (2 E_p).
Eigen::Matrix2cd wigner_rotation(const BoostParams& w, const Vec3& p, double mass);

/// F^{s' s}_Lambda(q) = u^{s' dagger}(q) S^dagger S u^s(q).
Eigen::Matrix2cd f_matrix(const BoostParams& w, const Vec3& q, double mass);

/// a'(p) = D(p) a(Lambda^{-1} p). Grid-sampled input is resampled on its own
/// grid; AccuracyError when the boosted support leaves the grid.
MomentumDistribution boost_distribution(const MomentumDistribution& dist, const BoostParams& w);

struct SpatialGrid {
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  std::array<int, 3> counts{16, 16, 16};

  std::size_t size() const { return std::size_t(counts[0]) * counts[1] * counts[2]; }
  std::size_t index(int i, int j, int k) const {
    return std::size_t(k) + std::size_t(counts[2]) * (std::size_t(j) + std::size_t(counts[1]) * i);
  }
  Vec3 point(int i, int j, int k) const {
    return origin + spacing * Vec3(double(i), double(j), double(k));
  }
  /// Grid of n^3 points symmetric about the origin (n even): x_j = (j - n/2) h.
  static SpatialGrid centered(int n, double spacing);
};

struct WavefunctionGrid {
  SpatialGrid grid;
  double time = 0.0;
  double mass = 1.0;
  std::vector<spinor::Vec4c> psi;  ///< Row-major in (x, y, z), see SpatialGrid::index.
  double input_norm = 0.0;         ///< dirac_norm of the source distribution.
  double discrete_norm = 0.0;      ///< sum |psi|^2 h^3.
};

/// psi(x, t) sampled on `grid` (FFT with the dual momentum lattice).
/// ResolutionError if the momentum support reaches the Nyquist box or the
/// packet reaches the spatial boundary.
WavefunctionGrid condition_on_time(const MomentumDistribution& dist, double t,
                                   const SpatialGrid& grid);

/// Applies exp(-i H_D dt) exactly in momentum space.
WavefunctionGrid evolve(const WavefunctionGrid& state, double dt);

using MomentumObservable = std::function<Mat4c(const Vec3& p)>;
/// Multiplication operator M(x) in position space.
struct PositionObservable {
  std::function<Mat4c(const Vec3& x)> kernel;
  Mat4c operator()(const Vec3& x) const { return kernel(x); }
};

namespace observables {
MomentumObservable identity();
MomentumObservable momentum(int axis);
MomentumObservable dirac_hamiltonian(double mass);
PositionObservable position(int axis);
}  // namespace observables

/// <psi(t)|M|psi(t)> by momentum-space quadrature (independent of t for
/// momentum-diagonal M). DomainError if M(p) is not Hermitian.
double expectation(const MomentumDistribution& dist, const MomentumObservable& observable,
                   double rel_tol = 1e-9);
/// Same observable evaluated on the conditioned grid state at time t.
double expectation(const MomentumDistribution& dist, const MomentumObservable& observable,
                   double t, const SpatialGrid& grid);
/// Position-space kernel on the conditioned grid state at time t.
double expectation(const MomentumDistribution& dist, const PositionObservable& observable,
                   double t, const SpatialGrid& grid);

/// Distribution of the momentum amplitudes at each mass of a mass superposition.
using DistributionFamily = std::function<MomentumDistribution(double mass)>;

/// <p^mu / m> = integral dm d^3p / (2 E) |phi(m)|^2 ||a(p, m)||^2 p^mu / m.
/// DomainError if the mass support reaches m <= 0.
FourVector proper_velocity(const DistributionFamily& family, const MassDistribution& masses,
                           double rel_tol = 1e-9);

/// integral dm |phi(m)|^2; tau evolution multiplies phi by e^{i m tau} and
/// leaves this unchanged.
double tau_norm(const MassDistribution& masses);

}  // namespace histdirac::history
