// Acceptance run: one PASS/FAIL line per criterion with the measured numbers.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "histdirac/clock_spectrum.hpp"
#include "histdirac/errors.hpp"
#include "histdirac/external_field.hpp"
#include "histdirac/history_state.hpp"
#include "histdirac/lightcone_density.hpp"
#include "histdirac/numerics.hpp"
#include "histdirac/spinor_algebra.hpp"

using namespace histdirac;
using std::numbers::pi;
using Vec3 = Eigen::Vector3d;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double rel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }

spinor::BoostParams random_generator(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  spinor::Mat4 w = spinor::Mat4::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      w(a, b) = u(rng);
      w(b, a) = -w(a, b);
    }
  return spinor::BoostParams::from_upper(w);
}

// 1 -------------------------------------------------------------------------
Outcome spinor_identities() {
  using namespace spinor;
  const auto t0 = Clock::now();
  const auto& g = gammas();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> pc(-3.0, 3.0), mc(0.1, 5.0);
  double dev = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Vec3 p(pc(rng), pc(rng), pc(rng));
    const double m = mc(rng);
    const double e = energy(p, m);
    const BoostParams w = random_generator(rng);
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < 2; ++s) {
        const double d = r == s ? 1.0 : 0.0;
        const auto ur = spinor_u(p, m, r).components, us = spinor_u(p, m, s).components;
        const auto vr = spinor_v(p, m, r).components, vs = spinor_v(p, m, s).components;
        dev = std::max(dev, std::abs(dirac_bilinear(ur, us) - 2.0 * m * d) / (2 * e));
        dev = std::max(dev, std::abs(dirac_bilinear(vr, vs) + 2.0 * m * d) / (2 * e));
        dev = std::max(dev, std::abs(ur.dot(us) - 2.0 * e * d) / (2 * e));
      }
    const Mat4 l = lorentz_matrix(w);
    const Mat4c sm = spinor_rep(w);
    const Mat4c si = sm.inverse();
    for (int mu = 0; mu < 4; ++mu) {
      Mat4c rhs = Mat4c::Zero();
      for (int nu = 0; nu < 4; ++nu) rhs += l(mu, nu) * g.gamma[nu];
      dev = std::max(dev, (si * g.gamma[mu] * sm - rhs).cwiseAbs().maxCoeff());
    }
    dev = std::max(dev, (sm.adjoint() * g.gamma[0] * sm - g.gamma[0]).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  return {dev < 1e-10 && secs < 5.0, fmt("max deviation %.3e (< 1e-10), %.3f s (< 5 s)", dev, secs)};
}

// 2 -------------------------------------------------------------------------
Outcome closed_vs_quadrature() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  int points = 0;
  for (double eps : {0.1, 0.5, 1.0}) {
    for (int n = 0; n < 25; ++n, ++points) {
      const double x = u(rng), t = u(rng);
      const auto a = lightcone::psi_closed(x, t, eps, 1.0);
      const auto b = lightcone::psi_quadrature(x, t, eps, 1.0);
      worst = std::max({worst, rel(b.psi0, a.psi0), rel(b.psi1, a.psi1)});
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-8 && secs < 60.0,
          fmt("%d points, max rel err %.3e (< 1e-8), %.2f s (< 60 s)", points, worst, secs)};
}

// 3 -------------------------------------------------------------------------
Outcome density_grids() {
  using namespace lightcone;
  // Limit grids against the piecewise forms, written out independently here.
  const GridAxis gx{-4.92, 0.12, 83}, gt{-4.96, 0.12, 84};
  DensityParams p;
  const auto inv = make_density_grid(p, gx, gt);
  p.kind = DensityKind::dirac;
  const auto dir = make_density_grid(p, gx, gt);
  double limit_dev = 0.0;
  for (int i = 0; i < gx.count; ++i)
    for (int j = 0; j < gt.count; ++j) {
      const double x = gx.at(i), t = gt.at(j), s2 = t * t - x * x;
      const double ri = s2 > 0 ? pi / std::sqrt(s2) : 0.0;
      const double rd = s2 > 0 ? pi * std::abs(t) / s2 : pi * std::abs(x) * std::exp(-2.0 * std::sqrt(-s2)) / -s2;
      limit_dev = std::max(limit_dev, std::abs(inv.value(i, j) - ri) / std::max(ri, 1.0));
      limit_dev = std::max(limit_dev, std::abs(dir.value(i, j) - rd) / std::max(rd, 1.0));
    }

  // eps = 1e-3 quadrature grid against the invariant limit.
  const GridAxis qx{-4.75, 0.5, 20}, qt{-5.0, 0.5, 21};
  DensityParams q;
  q.method = DensityMethod::quadrature;
  q.eps = 1e-3;
  const auto reg = make_density_grid(q, qx, qt);
  double time_rel = 0.0, peak = 0.0, space_max = 0.0;
  for (int i = 0; i < qx.count; ++i)
    for (int j = 0; j < qt.count; ++j) {
      const double x = qx.at(i), t = qt.at(j);
      const double v = reg.value(i, j);
      if (t * t > x * x) {
        const double ref = pi / std::sqrt(t * t - x * x);
        time_rel = std::max(time_rel, rel(v, ref));
        peak = std::max(peak, std::abs(v));
      } else {
        space_max = std::max(space_max, std::abs(v));
      }
    }
  const double ratio = space_max / peak;
  const bool ok = limit_dev < 1e-13 && time_rel < 1e-2 && ratio < 1e-3;
  return {ok, fmt("limit grids dev %.1e; eps=1e-3 quadrature: timelike rel %.3e (< 1e-2), "
                  "spacelike max / timelike peak %.3e (< 1e-3)",
                  limit_dev, time_rel, ratio)};
}

// 4 -------------------------------------------------------------------------
Outcome positivity() {
  std::mt19937_64 rng(20240612);
  std::uniform_real_distribution<double> xt(-10.0, 10.0), e01(0.0, 1.0);
  int violations = 0;
  double min_f = std::numeric_limits<double>::infinity();
  for (int n = 0; n < 10000; ++n) {
    const double x = xt(rng), t = xt(rng), eps = 2.0 * (1.0 - e01(rng));
    const double f = lightcone::F_ratio(x, t, eps);
    if (!(f > 1.0)) ++violations;
    min_f = std::min(min_f, f);
  }
  return {violations == 0, fmt("10000 samples, %d violations, min F = %.6g", violations, min_f)};
}

// 5 -------------------------------------------------------------------------
Outcome purity_ratio() {
  double worst = 0.0, rise = -1.0, limit = 0.0;
  for (double em : {0.1, 1.0, 10.0}) {
    double prev = 1.0;
    for (int i = 1; i <= 9; ++i) {
      const double v = 0.1 * i;
      const double r = clock::purity_ratio(em, 1.0, v);
      worst = std::max(worst, rel(clock::purity_ratio_numeric(em, 1.0, v), r));
      rise = std::max(rise, r - prev);
      prev = r;
    }
  }
  for (int i = 1; i <= 9; ++i) {
    const double v = 0.1 * i;
    limit = std::max(limit, std::abs(clock::purity_ratio(1e-3, 1.0, v) - std::sqrt(1.0 - v * v)));
  }
  return {worst < 1e-6 && rise < 0.0 && limit < 1e-3,
          fmt("closed vs numeric %.3e (< 1e-6); max R(v+0.1)-R(v) %.3e (< 0); |R - 1/gamma| at em=1e-3 %.3e (< 1e-3)",
              worst, rise, limit)};
}

// 6 -------------------------------------------------------------------------
Outcome trace_conservation() {
  double p_trace = 0.0, e_trace = 0.0;
  for (double v : {0.0, 0.3, 0.6, 0.9}) {
    const auto s = clock::proper_spectrum(1.0, 1.0, v);
    p_trace = std::max(p_trace, std::abs(clock::trace(s) - 1.0));
    e_trace = std::max(e_trace, std::abs(clock::energy_trace(s) - 1.0));
  }
  const auto dist = history::MomentumDistribution::gaussian(1.0, Vec3(0.3, 0.0, 0.2), 0.4);
  const double n0 = history::dirac_norm(dist);
  double boost_dev = 0.0;
  for (double v : {0.3, 0.6, 0.9}) {
    const auto b = history::boost_distribution(dist, spinor::BoostParams::boost_velocity(v, Vec3::UnitX()));
    boost_dev = std::max(boost_dev, std::abs(history::dirac_norm(b, 1e-10) - n0));
  }
  return {p_trace < 1e-7 && boost_dev < 1e-7,
          fmt("eps m = 1, v in {0, .3, .6, .9}: |int lambda^2 dp - 1| = %.3e (< 1e-7), "
              "|int lambda^2 p/E dp - 1| = %.3e; |dirac_norm(boosted) - dirac_norm| = %.3e (< 1e-7)",
              p_trace, e_trace, boost_dev)};
}

// 7 -------------------------------------------------------------------------
Outcome mass_orthogonality() {
  field::Lattice free_lat{2000, 40.0, field::Boundary::periodic};
  const auto free_rows = field::mass_orthogonality_check(field::StaticPotential::free(), 1.0, free_lat, 0, 5);
  double free_dev = 0.0, free_ratio = 0.0;
  for (const auto& r : free_rows) {
    free_dev = std::max(free_dev, r.discrepancy);
    const double k = pi * r.level / free_lat.half_length;
    free_ratio = std::max(free_ratio, std::abs(r.beta_expectation - 1.0 / std::sqrt(1.0 + k * k)));
  }
  field::Lattice wall{2000, 10.0, field::Boundary::hard_wall};
  const auto well_rows = field::mass_orthogonality_check(field::StaticPotential::square_well(0.5, 2.0), 1.0, wall, 0, 5);
  double well_dev = 0.0;
  for (const auto& r : well_rows) well_dev = std::max(well_dev, r.discrepancy);
  const bool ok = free_rows.size() == 5 && well_rows.size() == 5 && free_dev < 1e-3 && well_dev < 1e-3 &&
                  free_ratio < 1e-3;
  return {ok, fmt("N=2000, 5 levels: free %.3e, well %.3e (< 1e-3); free |<beta> - m/E| %.3e (< 1e-3)", free_dev,
                  well_dev, free_ratio)};
}

// 8 -------------------------------------------------------------------------
Outcome degenerate_overlaps() {
  const field::Lattice free_lat{2000, 40.0, field::Boundary::periodic};
  const auto free = field::StaticPotential::free();
  double free_max = 0.0;
  for (auto [k, kp] : {std::pair{1, 0}, {2, 1}, {3, 0}}) {
    const auto pair = field::degenerate_cross_mass_check(free, free_lat, k, 1.0, kp);
    if (!pair) throw InternalError("no free partner for level " + std::to_string(k));
    free_max = std::max(free_max, pair->overlap);
  }

  const auto well = field::StaticPotential::square_well(0.5, 2.0);
  const field::Lattice wall{2000, 10.0, field::Boundary::hard_wall};
  double well_max = 0.0;
  // Equal-parity pairs: opposite parities are orthogonal by symmetry alone.
  for (auto [k, kp] : {std::pair{2, 0}, {3, 1}, {4, 2}}) {
    const auto pair = field::degenerate_cross_mass_check(well, wall, k, 1.0, kp);
    if (!pair) throw InternalError("no well partner for level " + std::to_string(k));
    well_max = std::max(well_max, pair->overlap);
  }

  // Refinement of the degeneracy condition: detuning m' from the root by
  // delta leaves an overlap of order delta, which must fall as delta -> 0.
  const auto root = field::degenerate_cross_mass_check(well, wall, 2, 1.0, 0);
  std::vector<double> by_delta;
  for (double delta : {1e-2, 1e-4, 1e-6, 0.0})
    by_delta.push_back(field::cross_mass_overlap(well, wall, 2, 1.0, 0, root->m_prime + delta));
  bool decreasing = true;
  for (std::size_t i = 1; i < by_delta.size(); ++i) decreasing = decreasing && by_delta[i] < by_delta[i - 1];

  // Lattice refinement keeps the overlap below threshold.
  double sweep_max = 0.0;
  std::ostringstream sweep;
  for (int n : {500, 1000, 2000}) {
    const auto pair = field::degenerate_cross_mass_check(well, {n, 10.0, field::Boundary::hard_wall}, 2, 1.0, 0);
    sweep_max = std::max(sweep_max, pair->overlap);
    sweep << " " << n << ":" << fmt("%.1e", pair->overlap);
  }
  const bool ok = free_max < 1e-6 && well_max < 1e-4 && decreasing && sweep_max < 1e-4;
  return {ok, fmt("free %.3e (< 1e-6), well %.3e (< 1e-4); detuning 1e-2/1e-4/1e-6/0 -> %.1e/%.1e/%.1e/%.1e; N sweep",
                  free_max, well_max, by_delta[0], by_delta[1], by_delta[2], by_delta[3]) +
                  sweep.str()};
}

// 9 -------------------------------------------------------------------------
Outcome gordon_velocity() {
  const auto t0 = Clock::now();
  const Vec3 p0(0.3, 0.0, 0.6);
  const double m = 1.0;
  auto family = [&](double mass) { return history::MomentumDistribution::gaussian(mass, p0, 0.03); };
  const auto masses = history::MassDistribution::gaussian(m, 1e-3, 6.0);
  const auto u = history::proper_velocity(family, masses);
  const Vec3 spatial(u[1], u[2], u[3]);
  const double dev = (spatial - p0 / m).norm() / (p0 / m).norm();
  const double secs = seconds_since(t0);
  return {dev < 1e-2 && secs < 30.0,
          fmt("|<p/m> - p0/m| / |p0/m| = %.3e (< 1e-2), %.2f s (< 30 s)", dev, secs)};
}

// 10 ------------------------------------------------------------------------
// Oracle: Psi-bar Psi as a double sum over (m, m') on Gauss-Hermite nodes,
// m = mean + 2 sigma u, using eps -> 0+ amplitudes of each mass.
double tau_oracle(double x, double t, double tau, const history::MassDistribution& phi, double mean, double sigma,
                  const numerics::GaussRule& gh) {
  struct Node {
    std::complex<double> c;
    lightcone::Psi2 psi;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    const double u = gh.nodes[i];
    const double m = mean + 2.0 * sigma * u;
    const auto f = phi.phi(m);
    if (f == 0.0 || m <= 0.0) continue;
    // phi(m) dm = [phi(m) e^{u^2} 2 sigma] e^{-u^2} du
    const auto c = gh.weights[i] * std::exp(u * u) * 2.0 * sigma * f * std::exp(std::complex<double>(0.0, m * tau));
    nodes.push_back({c, lightcone::psi_closed(x, t, 0.0, m)});
  }
  std::complex<double> sum = 0.0;
  for (const auto& a : nodes)
    for (const auto& b : nodes)
      sum += std::conj(a.c) * b.c *
             (std::conj(a.psi.psi0) * b.psi.psi0 - std::conj(a.psi.psi1) * b.psi.psi1);
  return sum.real();
}

Outcome tau_density() {
  const double mean = 1.0, sigma = 0.1, tau = 3.0;
  const auto phi = history::MassDistribution::gaussian(mean, sigma);
  const auto gh = numerics::gauss_hermite(40);
  double worst = 0.0;
  int points = 0;
  for (double x : {-1.25, -0.25, 0.75, 1.75})
    for (double t : {-4.1, 2.1, 2.9, 3.7, 5.3}) {
      const double got = lightcone::tau_density(x, t, tau, phi);
      worst = std::max(worst, rel(got, tau_oracle(x, t, tau, phi, mean, sigma, gh)));
      ++points;
    }
  double space = 0.0;
  for (double x : {2.5, -3.0, 4.2})
    for (double t : {0.0, 1.9, -2.4}) space = std::max(space, std::abs(lightcone::tau_density(x, t, tau, phi)));
  return {worst < 1e-4 && space == 0.0,
          fmt("%d timelike points, max rel err %.3e (< 1e-4); max |rho| at spacelike points %.1e (== 0)", points,
              worst, space)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 spinor identities", spinor_identities},
      {"2 closed form vs quadrature", closed_vs_quadrature},
      {"3 density grids", density_grids},
      {"4 positivity F > 1", positivity},
      {"5 purity ratio", purity_ratio},
      {"6 trace and norm conservation", trace_conservation},
      {"7 mass orthogonality", mass_orthogonality},
      {"8 degenerate cross-mass overlap", degenerate_overlaps},
      {"9 Gordon mean velocity", gordon_velocity},
      {"10 tau density vs oracle", tau_density},
  };
  int failed = 0;
  const auto start = Clock::now();
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("%s  %-32s %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed, %.1f s\n", int(criteria.size()) - failed, criteria.size(),
              seconds_since(start));
  return failed;
}
