#include "histdirac/history_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <fftw3.h>

#include "histdirac/bessel.hpp"
#include "histdirac/errors.hpp"

namespace histdirac::history {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

using numerics::QuadratureSpec;
using spinor::Vec4c;

double sq_norm(const Amplitudes& a) { return std::norm(a[0]) + std::norm(a[1]); }

Amplitudes normalized_spin(Amplitudes spin) {
  const double n = std::sqrt(sq_norm(spin));
  if (!(n > 0.0)) throw DomainError("spin vector must be nonzero");
  return {spin[0] / n, spin[1] / n};
}

void check_mass(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("mass must be positive and finite");
}

// Positive-energy spinor u^s a_s / (2E) at p.
Vec4c weighted_spinor(const Vec3& p, double m, const Amplitudes& a) {
  const double e = spinor::energy(p, m);
  Vec4c out = spinor::spinor_u(p, m, 0).components * a[0] + spinor::spinor_u(p, m, 1).components * a[1];
  return out / (2.0 * e);
}

// A (0,3)/(1,2)-only generator keeps the z axis fixed.
bool preserves_z_axis(const BoostParams& w) {
  const spinor::Mat4& u = w.upper();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const bool allowed = (i == 0 && j == 3) || (i == 3 && j == 0) || (i == 1 && j == 2) || (i == 2 && j == 1);
      if (!allowed && u(i, j) != 0.0) return false;
    }
  }
  return true;
}

Eigen::Matrix2cd rotation_from(const Mat4c& smat, const spinor::Mat4& lambda_inv, const Vec3& p, double m) {
  const Vec3 q = spinor::transform_momentum(lambda_inv, p, m);
  const double e = spinor::energy(p, m);
  Eigen::Matrix2cd d;
  for (int sp = 0; sp < 2; ++sp) {
    const Vec4c up = spinor::spinor_u(p, m, sp).components;
    for (int s = 0; s < 2; ++s) {
      d(sp, s) = up.dot(smat * spinor::spinor_u(q, m, s).components) / (2.0 * e);
    }
  }
  return d;
}

// Gauss-Legendre 3 point nodes on [0, 1].
constexpr double kGl3Nodes[3] = {0.11270166537925831148, 0.5, 0.88729833462074168852};
constexpr double kGl3Weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Cellwise product Gauss rule for trilinear grid data: integral of f(p) d^3p.
template <class T, class F>
T integrate_over_grid(const MomentumGrid& g, F&& f) {
  T total = numerics::detail::zero<T>();
  const double vol = g.spacing[0] * g.spacing[1] * g.spacing[2];
  for (int k = 0; k + 1 < g.counts[2]; ++k) {
    for (int j = 0; j + 1 < g.counts[1]; ++j) {
      for (int i = 0; i + 1 < g.counts[0]; ++i) {
        T cell = numerics::detail::zero<T>();
        const Vec3 base = g.point(i, j, k);
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            for (int c = 0; c < 3; ++c) {
              const Vec3 p = base + Vec3(kGl3Nodes[a] * g.spacing[0], kGl3Nodes[b] * g.spacing[1],
                                         kGl3Nodes[c] * g.spacing[2]);
              cell += f(p) * (kGl3Weights[a] * kGl3Weights[b] * kGl3Weights[c]);
            }
          }
        }
        total += cell * vol;
      }
    }
  }
  return total;
}

QuadratureSpec ball_spec(double rel_tol) {
  QuadratureSpec spec;
  spec.rel_tol = rel_tol;
  spec.abs_tol = 1e-300;
  return spec;
}

}  // namespace

// ---------------------------------------------------------------------------
// MomentumGrid / MomentumDistribution

double MomentumGrid::p_max() const {
  double best = 0.0;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner = point((c & 1) ? counts[0] - 1 : 0, (c & 2) ? counts[1] - 1 : 0,
                              (c & 4) ? counts[2] - 1 : 0);
    best = std::max(best, corner.norm());
  }
  return best;
}

MomentumDistribution::MomentumDistribution(double mass, AmplitudeFn amplitude, Support support,
                                           DensityFn density)
    : mass_(mass), amplitude_(std::move(amplitude)), density_(std::move(density)), support_(support) {
  check_mass(mass_);
  if (!amplitude_) throw DomainError("MomentumDistribution: empty amplitude callable");
  if (!(support_.scale > 0.0)) throw DomainError("MomentumDistribution: support scale must be positive");
  if (!density_) {
    density_ = [fn = amplitude_](const Vec3& p) { return sq_norm(fn(p)); };
  }
}

MomentumDistribution MomentumDistribution::proper(double eps, double mass, Amplitudes spin) {
  check_mass(mass);
  if (!(eps > 0.0)) throw DomainError("proper distribution: eps must be positive");
  spin = normalized_spin(spin);
  // Write the prefactor with the scaled Bessel function so that eps*m/2 of
  // several hundred does not underflow: e^{-eps E/2} / K1(z) = e^{-eps (E - m)/2} / (e^z K1(z)).
  const double z = 0.5 * eps * mass;
  const double pref = eps / (4.0 * kPi * mass * special::bessel_k_scaled(1, z));
  auto dens = [=](const Vec3& p) {
    return pref * std::exp(-0.5 * eps * (spinor::energy(p, mass) - mass));
  };
  auto amp = [=](const Vec3& p) {
    const double r = std::sqrt(dens(p));
    return Amplitudes{r * spin[0], r * spin[1]};
  };
  Support sup;
  sup.scale = std::min({mass, 2.0 / eps, 2.0 * std::sqrt(mass / eps)});
  sup.axisymmetric_z = true;
  return MomentumDistribution(mass, amp, sup, dens);
}

MomentumDistribution MomentumDistribution::gaussian(double mass, const Vec3& center, double width,
                                                    Amplitudes spin, bool normalize) {
  check_mass(mass);
  if (!(width > 0.0)) throw DomainError("gaussian distribution: width must be positive");
  spin = normalized_spin(spin);
  Support sup;
  sup.center = center;
  sup.scale = width;
  sup.axisymmetric_z = center[0] == 0.0 && center[1] == 0.0;
  auto make = [&](double c) {
    auto dens = [=](const Vec3& p) {
      return c * c * std::exp(-(p - center).squaredNorm() / (2.0 * width * width));
    };
    auto amp = [=](const Vec3& p) {
      const double r = c * std::exp(-(p - center).squaredNorm() / (4.0 * width * width));
      return Amplitudes{r * spin[0], r * spin[1]};
    };
    return MomentumDistribution(mass, amp, sup, dens);
  };
  if (!normalize) return make(1.0);
  const double n = dirac_norm(make(1.0));
  return make(1.0 / std::sqrt(n));
}

MomentumDistribution MomentumDistribution::from_grid(double mass, const MomentumGrid& grid,
                                                     std::vector<Amplitudes> samples) {
  check_mass(mass);
  for (int d = 0; d < 3; ++d) {
    if (grid.counts[d] < 2) throw DomainError("from_grid: at least two samples per axis");
    if (!(grid.spacing[d] > 0.0)) throw DomainError("from_grid: spacing must be positive");
  }
  if (samples.size() != grid.size()) throw DomainError("from_grid: sample count does not match grid");
  auto data = std::make_shared<GridData>(GridData{grid, std::move(samples)});
  auto amp = [data](const Vec3& p) {
    const MomentumGrid& g = data->grid;
    int idx[3];
    double frac[3];
    for (int d = 0; d < 3; ++d) {
      const double u = (p[d] - g.origin[d]) / g.spacing[d];
      if (!(u >= 0.0) || u > double(g.counts[d] - 1)) return Amplitudes{0.0, 0.0};
      int i = static_cast<int>(std::floor(u));
      if (i >= g.counts[d] - 1) i = g.counts[d] - 2;
      idx[d] = i;
      frac[d] = u - i;
    }
    Amplitudes out{0.0, 0.0};
    for (int c = 0; c < 8; ++c) {
      const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
      const double w = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
                       (dz ? frac[2] : 1.0 - frac[2]);
      if (w == 0.0) continue;
      const Amplitudes& s = data->samples[g.index(idx[0] + dx, idx[1] + dy, idx[2] + dz)];
      out[0] += w * s[0];
      out[1] += w * s[1];
    }
    return out;
  };
  Support sup;
  const Vec3 far = grid.point(grid.counts[0] - 1, grid.counts[1] - 1, grid.counts[2] - 1);
  sup.center = 0.5 * (grid.origin + far);
  sup.scale = grid.spacing.minCoeff();
  MomentumDistribution out(mass, amp, sup);
  out.grid_ = std::move(data);
  return out;
}

double MomentumDistribution::interpolation_error_estimate() const {
  if (!grid_) return 0.0;
  const MomentumGrid& g = grid_->grid;
  const auto& s = grid_->samples;
  double worst = 0.0;
  for (int k = 0; k < g.counts[2]; ++k) {
    for (int j = 0; j < g.counts[1]; ++j) {
      for (int i = 0; i < g.counts[0]; ++i) {
        double total = 0.0;
        const int at[3] = {i, j, k};
        for (int d = 0; d < 3; ++d) {
          if (at[d] == 0 || at[d] == g.counts[d] - 1) continue;
          int lo[3] = {i, j, k}, hi[3] = {i, j, k};
          --lo[d];
          ++hi[d];
          for (int c = 0; c < 2; ++c) {
            const cplx second = s[g.index(lo[0], lo[1], lo[2])][c] - 2.0 * s[g.index(i, j, k)][c] +
                                s[g.index(hi[0], hi[1], hi[2])][c];
            total += std::abs(second);
          }
        }
        worst = std::max(worst, total / 8.0);
      }
    }
  }
  return worst;
}

MomentumDistribution MomentumDistribution::scaled(cplx c) const {
  if (grid_) {
    std::vector<Amplitudes> s = grid_->samples;
    for (auto& a : s) {
      a[0] *= c;
      a[1] *= c;
    }
    return from_grid(mass_, grid_->grid, std::move(s));
  }
  auto amp = [fn = amplitude_, c](const Vec3& p) {
    Amplitudes a = fn(p);
    return Amplitudes{c * a[0], c * a[1]};
  };
  const double c2 = std::norm(c);
  auto dens = [fn = density_, c2](const Vec3& p) { return c2 * fn(p); };
  return MomentumDistribution(mass_, amp, support_, dens);
}

// ---------------------------------------------------------------------------
// MassDistribution

MassDistribution MassDistribution::sharp(std::vector<std::pair<double, cplx>> components) {
  if (components.empty()) throw DomainError("MassDistribution::sharp: no components");
  for (const auto& [m, c] : components) {
    if (!std::isfinite(m) || !std::isfinite(std::abs(c))) {
      throw DomainError("MassDistribution::sharp: non-finite component");
    }
  }
  MassDistribution out;
  out.components_ = std::move(components);
  out.lower_ = out.upper_ = out.components_.front().first;
  for (const auto& comp : out.components_) {
    out.lower_ = std::min(out.lower_, comp.first);
    out.upper_ = std::max(out.upper_, comp.first);
  }
  return out;
}

MassDistribution MassDistribution::continuous(Fn phi, double lower, double upper) {
  if (!phi) throw DomainError("MassDistribution::continuous: empty callable");
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw DomainError("MassDistribution::continuous: need finite lower < upper");
  }
  MassDistribution out;
  out.phi_ = std::move(phi);
  out.lower_ = lower;
  out.upper_ = upper;
  return out;
}

MassDistribution MassDistribution::gaussian(double mean, double sigma, double cut) {
  if (!(sigma > 0.0) || !(cut > 0.0)) throw DomainError("MassDistribution::gaussian: sigma, cut > 0");
  const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.25);
  auto phi = [=](double m) { return cplx(norm * std::exp(-(m - mean) * (m - mean) / (4.0 * sigma * sigma)), 0.0); };
  return continuous(phi, mean - cut * sigma, mean + cut * sigma);
}

cplx MassDistribution::phi(double m) const {
  if (phi_) return (m < lower_ || m > upper_) ? cplx{} : phi_(m);
  cplx sum{};
  for (const auto& [mass, c] : components_) {
    if (mass == m) sum += c;
  }
  return sum;
}

cplx MassDistribution::transform(double tau) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->values.find(tau);
    if (it != cache_->values.end()) return it->second;
  }
  cplx value{};
  if (!phi_) {
    for (const auto& [m, c] : components_) value += c * std::exp(cplx(0.0, m * tau));
  } else {
    QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = 1e-15;
    spec.max_subdivisions = 20000;
    value = numerics::integrate([&](double m) { return phi_(m) * std::exp(cplx(0.0, m * tau)); },
                                lower_, upper_, spec)
                .value;
  }
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->values.emplace(tau, value);
  return value;
}

// ---------------------------------------------------------------------------
// Norms and overlaps

NormReport dirac_norm_report(const MomentumDistribution& dist, double rel_tol) {
  const double m = dist.mass();
  NormReport out;
  if (dist.is_grid()) {
    out.value = integrate_over_grid<double>(*dist.grid(), [&](const Vec3& p) {
      return dist.density(p) / (2.0 * spinor::energy(p, m));
    });
    out.error = dist.interpolation_error_estimate();
    out.cutoff = dist.grid()->p_max();
    return out;
  }
  const Support& s = dist.support();
  auto r = numerics::integrate_ball(
      [&](const Vec3& p) { return dist.density(p) / (2.0 * spinor::energy(p, m)); }, s.center, s.scale,
      ball_spec(rel_tol), s.axisymmetric_z);
  out.value = r.value;
  out.error = r.error;
  out.cutoff = r.cutoff;
  return out;
}

double dirac_norm(const MomentumDistribution& dist, double rel_tol) {
  return dirac_norm_report(dist, rel_tol).value;
}

OverlapResult invariant_overlap_coefficient(const MomentumDistribution& a, const MomentumDistribution& b,
                                            double rel_tol) {
  OverlapResult out;
  if (a.mass() != b.mass()) {
    out.mass_mismatch = true;
    return out;
  }
  const double m = a.mass();
  auto integrand = [&](const Vec3& p) {
    const Amplitudes x = a.amplitude(p);
    const Amplitudes y = b.amplitude(p);
    return (std::conj(x[0]) * y[0] + std::conj(x[1]) * y[1]) / (2.0 * spinor::energy(p, m));
  };
  if (a.is_grid() && b.is_grid()) {
    out.coefficient = integrate_over_grid<cplx>(*a.grid(), integrand);
    return out;
  }
  const Support& s = a.support().scale <= b.support().scale ? a.support() : b.support();
  QuadratureSpec spec = ball_spec(rel_tol);
  // The product of two normalized states can be far smaller than either.
  spec.abs_tol = 1e-13;
  out.coefficient = numerics::integrate_ball(integrand, s.center, s.scale, spec, false).value;
  return out;
}

// ---------------------------------------------------------------------------
// Boosts

Eigen::Matrix2cd wigner_rotation(const BoostParams& w, const Vec3& p, double mass) {
  check_mass(mass);
  return rotation_from(spinor::spinor_rep(w), spinor::lorentz_matrix(w.inverse()), p, mass);
}

Eigen::Matrix2cd f_matrix(const BoostParams& w, const Vec3& q, double mass) {
  check_mass(mass);
  const Mat4c s = spinor::spinor_rep(w);
  const Mat4c ss = s.adjoint() * s;
  Eigen::Matrix2cd f;
  for (int sp = 0; sp < 2; ++sp) {
    const Vec4c a = spinor::spinor_u(q, mass, sp).components;
    for (int r = 0; r < 2; ++r) {
      f(sp, r) = a.dot(ss * spinor::spinor_u(q, mass, r).components);
    }
  }
  return f;
}

MomentumDistribution boost_distribution(const MomentumDistribution& dist, const BoostParams& w) {
  const double m = dist.mass();
  const Mat4c s = spinor::spinor_rep(w);
  const spinor::Mat4 lambda = spinor::lorentz_matrix(w);
  const spinor::Mat4 lambda_inv = spinor::lorentz_matrix(w.inverse());
  auto source = std::make_shared<MomentumDistribution>(dist);

  auto amp = [=](const Vec3& p) {
    const Vec3 q = spinor::transform_momentum(lambda_inv, p, m);
    const Amplitudes a = source->amplitude(q);
    const Eigen::Matrix2cd d = rotation_from(s, lambda_inv, p, m);
    return Amplitudes{d(0, 0) * a[0] + d(0, 1) * a[1], d(1, 0) * a[0] + d(1, 1) * a[1]};
  };
  // D is unitary, so the density is carried over unchanged.
  auto dens = [=](const Vec3& p) {
    return source->density(spinor::transform_momentum(lambda_inv, p, m));
  };

  if (!dist.is_grid()) {
    Support sup = dist.support();
    sup.center = spinor::transform_momentum(lambda, sup.center, m);
    sup.axisymmetric_z = sup.axisymmetric_z && preserves_z_axis(w) && sup.center[0] == 0.0 &&
                         sup.center[1] == 0.0;
    return MomentumDistribution(m, amp, sup, dens);
  }

  const MomentumGrid& g = *dist.grid();
  std::vector<Amplitudes> samples(g.size());
  double peak = 0.0, edge = 0.0;
  for (int k = 0; k < g.counts[2]; ++k) {
    for (int j = 0; j < g.counts[1]; ++j) {
      for (int i = 0; i < g.counts[0]; ++i) {
        const Amplitudes a = amp(g.point(i, j, k));
        samples[g.index(i, j, k)] = a;
        const double n = sq_norm(a);
        peak = std::max(peak, n);
        const bool boundary = i == 0 || j == 0 || k == 0 || i == g.counts[0] - 1 ||
                              j == g.counts[1] - 1 || k == g.counts[2] - 1;
        if (boundary) edge = std::max(edge, n);
      }
    }
  }
  auto out = MomentumDistribution::from_grid(m, g, std::move(samples));
  if (peak == 0.0 || edge > 1e-8 * peak) {
    const double lost = dirac_norm(out);
    std::ostringstream msg;
    msg << "boost_distribution: boosted support exceeds the sampling grid (P_max = " << g.p_max()
        << ", boundary/peak density = " << (peak > 0.0 ? edge / peak : 1.0) << ")";
    throw AccuracyError(msg.str(), lost, std::abs(dirac_norm(dist) - lost));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conditioning on the clock

SpatialGrid SpatialGrid::centered(int n, double spacing) {
  if (n < 2 || n % 2 != 0) throw DomainError("SpatialGrid::centered: n must be even and >= 2");
  SpatialGrid g;
  g.spacing = spacing;
  g.counts = {n, n, n};
  const double o = -0.5 * n * spacing;
  g.origin = Vec3(o, o, o);
  return g;
}

namespace {

void check_grid(const SpatialGrid& g) {
  if (!(g.spacing > 0.0)) throw DomainError("spatial grid spacing must be positive");
  for (int n : g.counts) {
    if (n < 2 || n % 2 != 0) throw DomainError("spatial grid counts must be even and >= 2");
  }
}

Vec3 lattice_momentum(const SpatialGrid& g, int i, int j, int k) {
  const double two_pi = 2.0 * kPi;
  return Vec3((i - g.counts[0] / 2) * two_pi / (g.counts[0] * g.spacing),
              (j - g.counts[1] / 2) * two_pi / (g.counts[1] * g.spacing),
              (k - g.counts[2] / 2) * two_pi / (g.counts[2] * g.spacing));
}

double parity(int i, int j, int k) { return ((i + j + k) & 1) ? -1.0 : 1.0; }

// In-place 3D DFT of each spinor component. sign = FFTW_FORWARD or FFTW_BACKWARD.
void transform_components(const SpatialGrid& g, std::vector<Vec4c>& data, int sign) {
  const std::size_t n = g.size();
  fftw_complex* buf = fftw_alloc_complex(n);
  if (buf == nullptr) throw InternalError("fftw allocation failed");
  fftw_plan plan = fftw_plan_dft_3d(g.counts[0], g.counts[1], g.counts[2], buf, buf, sign, FFTW_ESTIMATE);
  auto* cbuf = reinterpret_cast<cplx*>(buf);
  for (int c = 0; c < 4; ++c) {
    for (std::size_t idx = 0; idx < n; ++idx) cbuf[idx] = data[idx][c];
    fftw_execute(plan);
    for (std::size_t idx = 0; idx < n; ++idx) data[idx][c] = cbuf[idx];
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
}

// Momentum-space samples psi~(p_k), up to a k-dependent scalar phase.
std::vector<Vec4c> to_momentum(const WavefunctionGrid& state) {
  const SpatialGrid& g = state.grid;
  std::vector<Vec4c> data = state.psi;
  for (int i = 0; i < g.counts[0]; ++i)
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k) data[g.index(i, j, k)] *= parity(i, j, k);
  transform_components(g, data, FFTW_FORWARD);
  return data;
}

double discrete_norm(const SpatialGrid& g, const std::vector<Vec4c>& psi) {
  double sum = 0.0;
  for (const auto& v : psi) sum += v.squaredNorm();
  return sum * g.spacing * g.spacing * g.spacing;
}

void check_hermitian(const Mat4c& m, const char* what) {
  const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw DomainError(std::string(what) + ": observable kernel is not Hermitian");
  }
}

}  // namespace

WavefunctionGrid condition_on_time(const MomentumDistribution& dist, double t, const SpatialGrid& grid) {
  check_grid(grid);
  const double m = dist.mass();
  const std::size_t n = grid.size();
  std::vector<Vec4c> data(n);
  double peak = 0.0, edge = 0.0, momentum_sum = 0.0;
  for (int i = 0; i < grid.counts[0]; ++i) {
    for (int j = 0; j < grid.counts[1]; ++j) {
      for (int k = 0; k < grid.counts[2]; ++k) {
        const Vec3 p = lattice_momentum(grid, i, j, k);
        const double e = spinor::energy(p, m);
        const Vec4c f = weighted_spinor(p, m, dist.amplitude(p)) * std::exp(cplx(0.0, -e * t));
        const double w = f.squaredNorm();
        momentum_sum += w;
        peak = std::max(peak, w);
        if (i == 0 || j == 0 || k == 0) edge = std::max(edge, w);
        data[grid.index(i, j, k)] = f * std::exp(cplx(0.0, p.dot(grid.origin)));
      }
    }
  }
  if (peak == 0.0) throw ResolutionError("condition_on_time: distribution vanishes on the momentum lattice");
  if (edge > 1e-10 * peak) {
    std::ostringstream msg;
    msg << "condition_on_time: momentum support reaches the Nyquist limit pi/h = " << kPi / grid.spacing
        << " (edge/peak = " << edge / peak << "); refine the spatial grid";
    throw ResolutionError(msg.str());
  }

  transform_components(grid, data, FFTW_BACKWARD);
  const double dp3 = std::pow(2.0 * kPi, 3) / (double(n) * std::pow(grid.spacing, 3));
  const double scale = dp3 * std::pow(2.0 * kPi, -1.5);
  double xpeak = 0.0, xedge = 0.0;
  for (int i = 0; i < grid.counts[0]; ++i) {
    for (int j = 0; j < grid.counts[1]; ++j) {
      for (int k = 0; k < grid.counts[2]; ++k) {
        auto& v = data[grid.index(i, j, k)];
        v *= scale * parity(i, j, k);
        const double w = v.squaredNorm();
        xpeak = std::max(xpeak, w);
        if (i == 0 || j == 0 || k == 0 || i == grid.counts[0] - 1 || j == grid.counts[1] - 1 ||
            k == grid.counts[2] - 1) {
          xedge = std::max(xedge, w);
        }
      }
    }
  }
  if (xedge > 1e-6 * xpeak) {
    std::ostringstream msg;
    msg << "condition_on_time: packet reaches the spatial boundary (edge/peak = " << xedge / xpeak
        << "); enlarge the grid";
    throw ResolutionError(msg.str());
  }

  WavefunctionGrid out;
  out.grid = grid;
  out.time = t;
  out.mass = m;
  out.psi = std::move(data);
  out.discrete_norm = discrete_norm(grid, out.psi);
  out.input_norm = dirac_norm(dist);
  if (std::abs(out.discrete_norm - out.input_norm) > 1e-6 * std::max(out.input_norm, 1e-300)) {
    std::ostringstream msg;
    msg << "condition_on_time: discrete norm " << out.discrete_norm << " differs from Dirac norm "
        << out.input_norm << " (momentum lattice too coarse; enlarge the spatial box)";
    throw ResolutionError(msg.str());
  }
  (void)momentum_sum;
  return out;
}

WavefunctionGrid evolve(const WavefunctionGrid& state, double dt) {
  check_grid(state.grid);
  const SpatialGrid& g = state.grid;
  std::vector<Vec4c> data = to_momentum(state);
  const auto& gm = spinor::gammas();
  const Mat4c beta = gm.gamma[0];
  for (int i = 0; i < g.counts[0]; ++i) {
    for (int j = 0; j < g.counts[1]; ++j) {
      for (int k = 0; k < g.counts[2]; ++k) {
        const Vec3 p = lattice_momentum(g, i, j, k);
        const double e = spinor::energy(p, state.mass);
        Mat4c h = state.mass * beta;
        for (int a = 0; a < 3; ++a) h += p[a] * (beta * gm.gamma[a + 1]);
        const Mat4c u = std::cos(e * dt) * Mat4c::Identity() - cplx(0.0, std::sin(e * dt) / e) * h;
        auto& v = data[g.index(i, j, k)];
        v = u * v;
      }
    }
  }
  transform_components(g, data, FFTW_BACKWARD);
  const double inv_n = 1.0 / double(g.size());
  for (int i = 0; i < g.counts[0]; ++i)
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k) data[g.index(i, j, k)] *= inv_n * parity(i, j, k);
  WavefunctionGrid out = state;
  out.time = state.time + dt;
  out.psi = std::move(data);
  out.discrete_norm = discrete_norm(g, out.psi);
  return out;
}

// ---------------------------------------------------------------------------
// Observables

namespace observables {

MomentumObservable identity() {
  return [](const Vec3&) { return Mat4c(Mat4c::Identity()); };
}

MomentumObservable momentum(int axis) {
  if (axis < 0 || axis > 2) throw DomainError("momentum observable: axis must be 0, 1 or 2");
  return [axis](const Vec3& p) { return Mat4c(p[axis] * Mat4c::Identity()); };
}

MomentumObservable dirac_hamiltonian(double mass) {
  return [mass](const Vec3& p) {
    const auto& gm = spinor::gammas();
    Mat4c h = mass * gm.gamma[0];
    for (int a = 0; a < 3; ++a) h += p[a] * (gm.gamma[0] * gm.gamma[a + 1]);
    return h;
  };
}

PositionObservable position(int axis) {
  if (axis < 0 || axis > 2) throw DomainError("position observable: axis must be 0, 1 or 2");
  return {[axis](const Vec3& x) { return Mat4c(x[axis] * Mat4c::Identity()); }};
}

}  // namespace observables

double expectation(const MomentumDistribution& dist, const MomentumObservable& observable, double rel_tol) {
  const double m = dist.mass();
  const Support& s = dist.support();
  for (int a = -1; a < 3; ++a) {
    const Vec3 probe = a < 0 ? s.center : Vec3(s.center + s.scale * Vec3::Unit(a));
    check_hermitian(observable(probe), "expectation");
  }
  auto integrand = [&](const Vec3& p) {
    const Vec4c f = weighted_spinor(p, m, dist.amplitude(p));
    return Eigen::Vector2d(f.dot(observable(p) * f).real(), f.squaredNorm());
  };
  auto r = numerics::integrate_ball(integrand, s.center, s.scale, ball_spec(rel_tol), false);
  return r.value[0] / r.value[1];
}

double expectation(const MomentumDistribution& dist, const MomentumObservable& observable, double t,
                   const SpatialGrid& grid) {
  const WavefunctionGrid state = condition_on_time(dist, t, grid);
  const std::vector<Vec4c> data = to_momentum(state);
  double num = 0.0, den = 0.0;
  bool checked = false;
  for (int i = 0; i < grid.counts[0]; ++i) {
    for (int j = 0; j < grid.counts[1]; ++j) {
      for (int k = 0; k < grid.counts[2]; ++k) {
        const Vec4c& v = data[grid.index(i, j, k)];
        const Mat4c mk = observable(lattice_momentum(grid, i, j, k));
        if (!checked) {
          check_hermitian(mk, "expectation");
          checked = true;
        }
        num += v.dot(mk * v).real();
        den += v.squaredNorm();
      }
    }
  }
  return num / den;
}

double expectation(const MomentumDistribution& dist, const PositionObservable& observable, double t,
                   const SpatialGrid& grid) {
  const WavefunctionGrid state = condition_on_time(dist, t, grid);
  double num = 0.0, den = 0.0;
  bool checked = false;
  for (int i = 0; i < grid.counts[0]; ++i) {
    for (int j = 0; j < grid.counts[1]; ++j) {
      for (int k = 0; k < grid.counts[2]; ++k) {
        const Vec4c& v = state.psi[grid.index(i, j, k)];
        const Mat4c vx = observable(grid.point(i, j, k));
        if (!checked) {
          check_hermitian(vx, "expectation");
          checked = true;
        }
        num += v.dot(vx * v).real();
        den += v.squaredNorm();
      }
    }
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Mass clock

FourVector proper_velocity(const DistributionFamily& family, const MassDistribution& masses, double rel_tol) {
  if (!(masses.lower() > 0.0)) {
    throw DomainError("proper_velocity: mass support reaches m <= 0 (1/m singularity)");
  }
  auto at_mass = [&](double m) -> FourVector {
    const MomentumDistribution dist = family(m);
    if (dist.mass() != m) throw DomainError("proper_velocity: family returned a distribution of another mass");
    const Support& s = dist.support();
    auto integrand = [&](const Vec3& p) {
      const double e = spinor::energy(p, m);
      const double w = dist.density(p) / (2.0 * e * m);
      return FourVector(w * e, w * p[0], w * p[1], w * p[2]);
    };
    QuadratureSpec spec = ball_spec(rel_tol);
    spec.abs_tol = 1e-14;
    return numerics::integrate_ball(integrand, s.center, s.scale, spec, false).value;
  };
  if (masses.is_sharp()) {
    FourVector total = FourVector::Zero();
    for (const auto& [m, c] : masses.components()) total += std::norm(c) * at_mass(m);
    return total;
  }
  QuadratureSpec outer;
  outer.rel_tol = std::max(rel_tol, 1e-8);
  outer.abs_tol = 1e-12;
  return numerics::integrate(
             [&](double m) -> FourVector { return std::norm(masses.phi(m)) * at_mass(m); }, masses.lower(),
             masses.upper(), outer)
      .value;
}

double tau_norm(const MassDistribution& masses) {
  if (masses.is_sharp()) {
    double sum = 0.0;
    for (const auto& comp : masses.components()) sum += std::norm(comp.second);
    return sum;
  }
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-15;
  return numerics::integrate([&](double m) { return std::norm(masses.phi(m)); }, masses.lower(),
                             masses.upper(), spec)
      .value;
}

}  // namespace histdirac::history
