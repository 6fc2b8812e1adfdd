#pragma once

// Gamma matrices, Lorentz and spinor representations, free Dirac spinors.
//
// Conventions (used everywhere in the library):
//   * metric eta = diag(+1, -1, -1, -1), p.x = p_mu x^mu;
//   * Dirac (standard) representation of gamma^mu;
//   * a generator is stored with upper indices w^{mu nu} (antisymmetric);
//     Lambda = exp(W) with W^mu_nu = w^{mu rho} eta_{rho nu} and
//     S(Lambda) = exp(-(i/4) sigma_{mu nu} w^{mu nu});
//   * BoostParams::boost(chi * z) with chi > 0 maps the rest momentum
//     (m, 0, 0, 0) to (m cosh chi, 0, 0, m sinh chi), i.e. Lambda^0_3 = +sinh chi.

#include <array>
#include <complex>

#include <Eigen/Core>

namespace histdirac::spinor {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix4d;
using Mat4c = Eigen::Matrix4cd;
using Vec4c = Eigen::Vector4cd;
using Vec3 = Eigen::Vector3d;
/// Contravariant components (x^0, x^1, x^2, x^3).
using FourVector = Eigen::Vector4d;

const Mat4& metric();

struct GammaSet {
  std::array<Mat4c, 4> gamma;                    ///< gamma^mu
  std::array<std::array<Mat4c, 4>, 4> sigma;     ///< sigma_{mu nu} (lower indices)
};

GammaSet build_gamma();
/// Process-wide immutable copy of build_gamma().
const GammaSet& gammas();

/// Proper orthochronous Lorentz generator.
class BoostParams {
 public:
  BoostParams() : w_(Mat4::Zero()) {}

  /// From upper-index w^{mu nu}; InvalidGeneratorError unless antisymmetric.
  static BoostParams from_upper(const Mat4& w);
  /// From the mixed generator W^mu_nu; InvalidGeneratorError unless eta W is antisymmetric.
  static BoostParams from_mixed(const Mat4& w_mixed);
  /// Pure boost with rapidity vector chi (|chi| = rapidity, direction = boost axis).
  static BoostParams boost(const Vec3& rapidity);
  /// Boost with velocity v along `axis` (0 <= v < 1).
  static BoostParams boost_velocity(double v, const Vec3& axis = Vec3::UnitZ());
  /// Right-handed rotation by |angle| about angle/|angle|.
  static BoostParams rotation(const Vec3& angle);

  const Mat4& upper() const noexcept { return w_; }
  Mat4 mixed() const;
  BoostParams inverse() const { return BoostParams(-w_); }
  BoostParams operator+(const BoostParams& o) const { return BoostParams(w_ + o.w_); }

 private:
  explicit BoostParams(const Mat4& w) : w_(w) {}
  Mat4 w_;
};

/// Matrix exponential by scaling and squaring with a Taylor core.
Mat4 expm(const Mat4& a);
Mat4c expm(const Mat4c& a);

/// Lambda^mu_nu = exp(W).
Mat4 lorentz_matrix(const BoostParams& w);
/// S(Lambda) = exp(-(i/4) sigma_{mu nu} w^{mu nu}).
Mat4c spinor_rep(const BoostParams& w);

enum class SpinorKind { particle, antiparticle };

struct DiracSpinor {
  Vec4c components;
  SpinorKind kind = SpinorKind::particle;
  int spin = 0;
  Vec3 momentum = Vec3::Zero();
  double mass = 1.0;
};

double energy(const Vec3& p, double m);
FourVector on_shell(const Vec3& p, double m);

/// u^s_p = (E+m)^{-1/2} ((E+m) chi^s, (p.sigma) chi^s); DomainError if m <= 0
/// or s not in {0, 1}.
DiracSpinor spinor_u(const Vec3& p, double m, int s);
/// v^r_p = (E+m)^{-1/2} ((p.sigma) chi^r, (E+m) chi^r).
DiracSpinor spinor_v(const Vec3& p, double m, int r);

/// a^dagger gamma^0 b.
cplx dirac_bilinear(const Vec4c& a, const Vec4c& b);

/// Spatial part of Lambda applied to the on-shell vector (E_p, p).
Vec3 transform_momentum(const Mat4& lambda, const Vec3& p, double m);

}  // namespace histdirac::spinor
