#include "histdirac/spinor_algebra.hpp"

#include <cmath>
#include <string>

#include "histdirac/errors.hpp"

namespace histdirac::spinor {

namespace {

constexpr cplx I{0.0, 1.0};

template <class M>
M expm_impl(const M& a) {
  // Scale to norm <= 1/2, 24-term Taylor (truncation < 1e-30), square back.
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const M scaled = a / std::ldexp(1.0, squarings);
  M result = M::Identity();
  M term = M::Identity();
  for (int k = 1; k <= 24; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

double antisymmetry_defect(const Mat4& w) { return (w + w.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

const Mat4& metric() {
  static const Mat4 eta = Eigen::Vector4d(1.0, -1.0, -1.0, -1.0).asDiagonal();
  return eta;
}

GammaSet build_gamma() {
  GammaSet g;
  for (auto& m : g.gamma) m.setZero();
  // gamma^0 = diag(1, 1, -1, -1)
  g.gamma[0].diagonal() << 1.0, 1.0, -1.0, -1.0;
  // gamma^k = [[0, sigma_k], [-sigma_k, 0]]
  Eigen::Matrix2cd pauli[3];
  pauli[0] << 0.0, 1.0, 1.0, 0.0;
  pauli[1] << 0.0, -I, I, 0.0;
  pauli[2] << 1.0, 0.0, 0.0, -1.0;
  for (int k = 0; k < 3; ++k) {
    g.gamma[k + 1].block<2, 2>(0, 2) = pauli[k];
    g.gamma[k + 1].block<2, 2>(2, 0) = -pauli[k];
  }
  const Mat4& eta = metric();
  std::array<Mat4c, 4> lower;
  for (int mu = 0; mu < 4; ++mu) lower[mu] = eta(mu, mu) * g.gamma[mu];
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      g.sigma[mu][nu] = (0.5 * I) * (lower[mu] * lower[nu] - lower[nu] * lower[mu]);
    }
  }
  return g;
}

const GammaSet& gammas() {
  static const GammaSet g = build_gamma();
  return g;
}

BoostParams BoostParams::from_upper(const Mat4& w) {
  const double defect = antisymmetry_defect(w);
  if (!(defect <= 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff()))) {
    throw InvalidGeneratorError("BoostParams: w^{mu nu} not antisymmetric (defect " +
                                std::to_string(defect) + ")");
  }
  return BoostParams(0.5 * (w - w.transpose()));
}

BoostParams BoostParams::from_mixed(const Mat4& w_mixed) {
  // w^{mu nu} = W^mu_rho eta^{rho nu}; eta is its own inverse.
  return from_upper(w_mixed * metric());
}

BoostParams BoostParams::boost(const Vec3& rapidity) {
  Mat4 w = Mat4::Zero();
  for (int i = 0; i < 3; ++i) {
    w(i + 1, 0) = rapidity[i];
    w(0, i + 1) = -rapidity[i];
  }
  return BoostParams(w);
}

BoostParams BoostParams::boost_velocity(double v, const Vec3& axis) {
  if (!(v >= 0.0 && v < 1.0)) throw DomainError("boost_velocity: need 0 <= v < 1");
  const double n = axis.norm();
  if (!(n > 0.0)) throw DomainError("boost_velocity: zero axis");
  return boost(std::atanh(v) * axis / n);
}

BoostParams BoostParams::rotation(const Vec3& angle) {
  // W^i_j = -eps_{ijk} theta_k, hence w^{ij} = +eps_{ijk} theta_k.
  Mat4 w = Mat4::Zero();
  w(1, 2) = angle[2];
  w(2, 1) = -angle[2];
  w(2, 3) = angle[0];
  w(3, 2) = -angle[0];
  w(3, 1) = angle[1];
  w(1, 3) = -angle[1];
  return BoostParams(w);
}

Mat4 BoostParams::mixed() const { return w_ * metric(); }

Mat4 expm(const Mat4& a) { return expm_impl(a); }
Mat4c expm(const Mat4c& a) { return expm_impl(a); }

Mat4 lorentz_matrix(const BoostParams& w) { return expm(w.mixed()); }

Mat4c spinor_rep(const BoostParams& w) {
  const auto& g = gammas();
  Mat4c generator = Mat4c::Zero();
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      if (w.upper()(mu, nu) != 0.0) generator += g.sigma[mu][nu] * w.upper()(mu, nu);
    }
  }
  return expm(Mat4c(cplx(0.0, -0.25) * generator));
}

double energy(const Vec3& p, double m) { return std::sqrt(p.squaredNorm() + m * m); }

FourVector on_shell(const Vec3& p, double m) {
  return FourVector(energy(p, m), p[0], p[1], p[2]);
}

namespace {

Eigen::Matrix2cd p_dot_sigma(const Vec3& p) {
  Eigen::Matrix2cd m;
  m << p[2], cplx(p[0], -p[1]), cplx(p[0], p[1]), -p[2];
  return m;
}

void check_mass_spin(double m, int s) {
  if (!(m > 0.0)) throw DomainError("spinor: mass must be positive");
  if (s != 0 && s != 1) throw DomainError("spinor: spin label must be 0 or 1");
}

}  // namespace

DiracSpinor spinor_u(const Vec3& p, double m, int s) {
  check_mass_spin(m, s);
  const double e = energy(p, m);
  const double norm = 1.0 / std::sqrt(e + m);
  Eigen::Vector2cd chi = Eigen::Vector2cd::Zero();
  chi[s] = 1.0;
  DiracSpinor u;
  u.components.head<2>() = (e + m) * norm * chi;
  u.components.tail<2>() = norm * (p_dot_sigma(p) * chi);
  u.kind = SpinorKind::particle;
  u.spin = s;
  u.momentum = p;
  u.mass = m;
  return u;
}

DiracSpinor spinor_v(const Vec3& p, double m, int r) {
  check_mass_spin(m, r);
  const double e = energy(p, m);
  const double norm = 1.0 / std::sqrt(e + m);
  Eigen::Vector2cd chi = Eigen::Vector2cd::Zero();
  chi[r] = 1.0;
  DiracSpinor v;
  v.components.head<2>() = norm * (p_dot_sigma(p) * chi);
  v.components.tail<2>() = (e + m) * norm * chi;
  v.kind = SpinorKind::antiparticle;
  v.spin = r;
  v.momentum = p;
  v.mass = m;
  return v;
}

cplx dirac_bilinear(const Vec4c& a, const Vec4c& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] - std::conj(a[2]) * b[2] -
         std::conj(a[3]) * b[3];
}

Vec3 transform_momentum(const Mat4& lambda, const Vec3& p, double m) {
  const FourVector q = lambda * on_shell(p, m);
  return q.tail<3>();
}

}  // namespace histdirac::spinor
