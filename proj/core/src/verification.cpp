#include "histdirac/verification.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "histdirac/bessel.hpp"
#include "histdirac/clock_spectrum.hpp"
#include "histdirac/errors.hpp"
#include "histdirac/external_field.hpp"
#include "histdirac/history_state.hpp"
#include "histdirac/lightcone_density.hpp"
#include "histdirac/numerics.hpp"
#include "histdirac/spinor_algebra.hpp"
#include "histdirac/version.hpp"

namespace histdirac::verify {
namespace {

using namespace spinor;
using std::numbers::pi;

struct Measured {
  double value;
  std::string detail;
};

class Runner {
 public:
  explicit Runner(Report& r) : report_(r) {}

  void check(const std::string& module, const std::string& name, double threshold, bool below,
             const std::function<Measured()>& body) {
    CheckResult c;
    c.module = module;
    c.name = name;
    c.threshold = threshold;
    c.below = below;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Measured m = body();
      c.value = m.value;
      c.detail = m.detail;
      c.passed = std::isfinite(m.value) && (below ? m.value < threshold : m.value > threshold);
    } catch (const std::exception& e) {
      c.value = std::numeric_limits<double>::quiet_NaN();
      c.detail = std::string("exception: ") + e.what();
      c.passed = false;
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.checks.push_back(std::move(c));
  }

 private:
  Report& report_;
};

double max_abs(const Mat4c& a) { return a.cwiseAbs().maxCoeff(); }

BoostParams random_generator(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Mat4 w = Mat4::Zero();
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      w(a, b) = u(rng);
      w(b, a) = -w(a, b);
    }
  }
  return BoostParams::from_upper(w);
}

Vec3 random_momentum(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void spinor_checks(Runner& run, const Options& opts) {
  const auto& g = gammas();
  const Mat4& eta = metric();

  run.check("spinor_algebra", "clifford_algebra", 1e-14, true, [&] {
    double dev = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        dev = std::max(dev, max_abs(g.gamma[a] * g.gamma[b] + g.gamma[b] * g.gamma[a] -
                                    2.0 * eta(a, b) * Mat4c::Identity()));
    return Measured{dev, "max |{g^a, g^b} - 2 eta^ab|"};
  });

  run.check("spinor_algebra", "sigma12_diagonal", 1e-14, true, [&] {
    Mat4c d = Mat4c::Zero();
    d.diagonal() << 1.0, -1.0, 1.0, -1.0;
    return Measured{max_abs(g.sigma[1][2] - d), "sigma_12 = diag(1, -1, 1, -1)"};
  });

  const bool flip = opts.inject_fault == "spinor_sign";
  run.check("spinor_algebra", "pauli_theorem", 1e-10, true, [&] {
    std::mt19937_64 rng(opts.seed);
    double dev = 0.0;
    for (int n = 0; n < opts.samples; ++n) {
      const BoostParams w = random_generator(rng);
      const Mat4 lambda = lorentz_matrix(w);
      const Mat4c s = spinor_rep(flip ? w.inverse() : w);
      const Mat4c sinv = s.inverse();
      for (int mu = 0; mu < 4; ++mu) {
        Mat4c rhs = Mat4c::Zero();
        for (int nu = 0; nu < 4; ++nu) rhs += lambda(mu, nu) * g.gamma[nu];
        dev = std::max(dev, max_abs(sinv * g.gamma[mu] * s - rhs));
      }
    }
    return Measured{dev, "max |S^-1 g^mu S - Lambda^mu_nu g^nu| over random generators" +
                             std::string(flip ? " (fault injected)" : "")};
  });

  run.check("spinor_algebra", "pseudo_unitarity", 1e-10, true, [&] {
    std::mt19937_64 rng(opts.seed + 1);
    double dev = 0.0;
    for (int n = 0; n < opts.samples; ++n) {
      const Mat4c s = spinor_rep(random_generator(rng));
      dev = std::max(dev, max_abs(s.adjoint() * g.gamma[0] * s - g.gamma[0]));
    }
    return Measured{dev, "max |S^dagger g^0 S - g^0|"};
  });

  run.check("spinor_algebra", "boost_closed_form", 1e-12, true, [&] {
    double dev = 0.0;
    for (double chi : {0.3, 1.0, 2.5}) {
      const Mat4 l = lorentz_matrix(BoostParams::boost(Vec3(0.0, 0.0, chi)));
      Mat4 ref = Mat4::Identity();
      ref(0, 0) = ref(3, 3) = std::cosh(chi);
      ref(0, 3) = ref(3, 0) = std::sinh(chi);
      dev = std::max(dev, (l - ref).cwiseAbs().maxCoeff() / std::cosh(chi));
    }
    return Measured{dev, "z-boost against cosh/sinh, relative to cosh chi"};
  });

  run.check("spinor_algebra", "collinear_composition", 1e-12, true, [&] {
    const Vec3 a(0.2, -0.4, 0.7);
    const Mat4 prod = lorentz_matrix(BoostParams::boost(0.6 * a)) * lorentz_matrix(BoostParams::boost(0.9 * a));
    const Mat4 once = lorentz_matrix(BoostParams::boost(1.5 * a));
    return Measured{(prod - once).cwiseAbs().maxCoeff() / once.cwiseAbs().maxCoeff(),
                    "Lambda(a chi1) Lambda(a chi2) = Lambda(a (chi1 + chi2))"};
  });

  auto spinor_sweep = [&](auto&& fn, std::uint64_t salt) {
    std::mt19937_64 rng(opts.seed + salt);
    std::uniform_real_distribution<double> mass(0.1, 5.0);
    double dev = 0.0;
    for (int n = 0; n < opts.samples; ++n) {
      const double m = mass(rng);
      const Vec3 p = random_momentum(rng, 3.0);
      dev = std::max(dev, fn(p, m));
    }
    return dev;
  };

  run.check("spinor_algebra", "ubar_u_normalization", 1e-10, true, [&] {
    const double dev = spinor_sweep(
        [](const Vec3& p, double m) {
          double d = 0.0;
          for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s) {
              const cplx v = dirac_bilinear(spinor_u(p, m, r).components, spinor_u(p, m, s).components);
              d = std::max(d, std::abs(v - (r == s ? 2.0 * m : 0.0)) / (2.0 * energy(p, m)));
            }
          return d;
        },
        2);
    return Measured{dev, "|u-bar^r u^s - 2m delta| / 2E"};
  });

  run.check("spinor_algebra", "vbar_v_normalization", 1e-10, true, [&] {
    const double dev = spinor_sweep(
        [](const Vec3& p, double m) {
          double d = 0.0;
          for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s) {
              const cplx v = dirac_bilinear(spinor_v(p, m, r).components, spinor_v(p, m, s).components);
              d = std::max(d, std::abs(v + (r == s ? 2.0 * m : 0.0)) / (2.0 * energy(p, m)));
            }
          return d;
        },
        3);
    return Measured{dev, "|v-bar^r v^s + 2m delta| / 2E"};
  });

  run.check("spinor_algebra", "udagger_u_energy", 1e-10, true, [&] {
    const double dev = spinor_sweep(
        [](const Vec3& p, double m) {
          double d = 0.0;
          const double e = energy(p, m);
          for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s) {
              const cplx v = spinor_u(p, m, r).components.dot(spinor_u(p, m, s).components);
              d = std::max(d, std::abs(v - (r == s ? 2.0 * e : 0.0)) / (2.0 * e));
            }
          return d;
        },
        4);
    return Measured{dev, "|u^dagger u - 2E delta| / 2E"};
  });

  run.check("spinor_algebra", "ubar_v_orthogonality", 1e-10, true, [&] {
    const double dev = spinor_sweep(
        [](const Vec3& p, double m) {
          double d = 0.0;
          for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s) {
              const cplx v = dirac_bilinear(spinor_u(p, m, r).components, spinor_v(p, m, s).components);
              d = std::max(d, std::abs(v) / (2.0 * energy(p, m)));
            }
          return d;
        },
        5);
    return Measured{dev, "|u-bar^r v^s| / 2E"};
  });
}

void history_checks(Runner& run, const Options& opts) {
  run.check("history_state", "proper_distribution_norm", 1e-9, true, [&] {
    double dev = 0.0;
    for (double em : {0.1, 1.0, 10.0}) dev = std::max(dev, std::abs(history::dirac_norm(
                                                                history::MomentumDistribution::proper(em, 1.0)) -
                                                            1.0));
    return Measured{dev, "|dirac_norm - 1| for eps m in {0.1, 1, 10}"};
  });

  run.check("history_state", "wigner_rotation_unitary", 1e-12, true, [&] {
    std::mt19937_64 rng(opts.seed + 6);
    double dev = 0.0;
    for (int n = 0; n < 20; ++n) {
      const BoostParams w = random_generator(rng);
      const Eigen::Matrix2cd d = history::wigner_rotation(w, random_momentum(rng, 2.0), 1.3);
      dev = std::max(dev, (d.adjoint() * d - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
    }
    return Measured{dev, "max |D^dagger D - 1|"};
  });

  run.check("history_state", "f_matrix_energy", 1e-10, true, [&] {
    std::mt19937_64 rng(opts.seed + 7);
    double dev = 0.0;
    for (int n = 0; n < 20; ++n) {
      const BoostParams w = random_generator(rng);
      const Vec3 q = random_momentum(rng, 2.0);
      const double m = 0.8;
      const Vec3 lq = transform_momentum(lorentz_matrix(w), q, m);
      const double e = energy(lq, m);
      const Eigen::Matrix2cd f = history::f_matrix(w, q, m);
      dev = std::max(dev, (f - 2.0 * e * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() / (2.0 * e));
    }
    return Measured{dev, "|F(q) - 2 E_{Lambda q}| / 2 E_{Lambda q}"};
  });

  run.check("history_state", "boost_norm_invariance", 1e-7, true, [&] {
    const auto dist = history::MomentumDistribution::gaussian(1.0, Vec3(0.3, 0.0, 0.2), 0.4);
    const double before = history::dirac_norm(dist);
    double dev = 0.0;
    for (double v : {0.3, 0.6}) {
      const auto boosted = history::boost_distribution(dist, BoostParams::boost_velocity(v, Vec3::UnitX()));
      dev = std::max(dev, std::abs(history::dirac_norm(boosted, 1e-10) - before));
    }
    return Measured{dev, "|norm(boosted) - norm| for x-boosts v = 0.3, 0.6"};
  });
}

void lightcone_checks(Runner& run, const Options& opts) {
  run.check("lightcone_density", "closed_vs_quadrature", 1e-8, true, [&] {
    double dev = 0.0;
    const double pts[5][2] = {{0.3, 0.1}, {-1.2, 0.7}, {2.0, -1.5}, {0.5, 2.5}, {-3.0, 0.4}};
    for (double eps : {0.1, 0.5, 1.0}) {
      for (const auto& xt : pts) {
        const auto a = lightcone::psi_closed(xt[0], xt[1], eps, 1.0);
        const auto b = lightcone::psi_quadrature(xt[0], xt[1], eps, 1.0);
        dev = std::max({dev, std::abs(a.psi0 - b.psi0) / std::abs(a.psi0),
                        std::abs(a.psi1 - b.psi1) / std::max(std::abs(a.psi1), 1e-300)});
      }
    }
    return Measured{dev, "max relative difference of psi_0, psi_1 on 15 points"};
  });

  run.check("lightcone_density", "positivity_F_gt_1", 0.0, false, [&] {
    std::mt19937_64 rng(opts.seed + 8);
    std::uniform_real_distribution<double> xt(-10.0, 10.0);
    std::uniform_real_distribution<double> e01(0.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (int n = 0; n < opts.positivity_samples; ++n) {
      const double x = xt(rng), t = xt(rng);
      const double eps = 2.0 * (1.0 - e01(rng));  // (0, 2]
      const double f = lightcone::F_ratio(x, t, eps);
      if (!(f > 1.0)) ++violations;
      worst = std::min(worst, f - 1.0);
    }
    return Measured{worst, std::to_string(violations) + " violations; value = min(F - 1)"};
  });

  run.check("lightcone_density", "density_at_0_2", 1e-14, true, [&] {
    const double a = lightcone::invariant_density(0.0, 2.0);
    const double b = lightcone::dirac_density(0.0, 2.0, 1.0);
    return Measured{std::max(rel(a, pi / 2), rel(b, pi / 2)), "invariant and Dirac density at (0, 2) vs pi/2"};
  });

  run.check("lightcone_density", "spacelike_zero", 1e-300, true, [&] {
    double worst = 0.0;
    for (double x : {1.0, 2.5, -4.0})
      for (double t : {0.0, 0.5, -0.9}) worst = std::max(worst, std::abs(lightcone::invariant_density(x, t)));
    return Measured{worst, "max |invariant density| at spacelike points"};
  });

  run.check("lightcone_density", "continuity_equation", 1e-5, true, [&] {
    const auto masses = history::MassDistribution::sharp({{1.0, 1.0 / std::sqrt(2.0)}, {1.5, 1.0 / std::sqrt(2.0)}});
    const auto r = lightcone::continuity_residual(masses, 0.5, 0.3, {-1.0, 0.2, 1.7}, {-0.5, 0.8, 2.0});
    return Measured{r.relative(), "max |d_t j0 + d_x j1 + d_tau rho| / term scale"};
  });

  run.check("lightcone_density", "sharp_tau_reduces_to_invariant", 1e-12, true, [&] {
    const auto masses = history::MassDistribution::sharp({{1.0, 1.0}});
    double dev = 0.0;
    for (double t : {1.5, 3.0, -2.0})
      dev = std::max(dev, rel(lightcone::tau_density(0.4, t, 0.7, masses), lightcone::invariant_density(0.4, t)));
    return Measured{dev, "tau density of a single sharp mass vs invariant density"};
  });
}

void clock_checks(Runner& run) {
  run.check("clock_spectrum", "bessel_k_vs_integral", 1e-12, true, [&] {
    double dev = 0.0;
    numerics::QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = 0.0;
    for (int nu = 0; nu < 3; ++nu) {
      for (double z : {0.05, 0.7, 2.5, 12.0}) {
        auto f = [&](double t) { return std::exp(-z * (std::cosh(t) - 1.0)) * std::cosh(nu * t); };
        const double ref = numerics::integrate_semi_infinite(f, 0.0, 1.0, spec).value;
        dev = std::max(dev, rel(special::bessel_k_scaled(nu, z), ref));
      }
    }
    return Measured{dev, "e^z K_nu(z) vs integral of e^{-z (cosh t - 1)} cosh(nu t)"};
  });

  run.check("clock_spectrum", "energy_trace_unity", 1e-8, true, [&] {
    double dev = 0.0;
    for (double v : {0.0, 0.5, 0.9})
      dev = std::max(dev, std::abs(clock::energy_trace(clock::proper_spectrum(1.0, 1.0, v)) - 1.0));
    return Measured{dev, "|integral lambda^2 p / E dp - 1|, eps m = 1"};
  });

  run.check("clock_spectrum", "trace_closed_form", 1e-9, true, [&] {
    double dev = 0.0;
    for (double em : {0.1, 1.0, 10.0})
      dev = std::max(dev, rel(clock::trace(clock::proper_spectrum(em, 1.0, 0.0)), clock::proper_trace_closed(em, 1.0)));
    return Measured{dev, "integral lambda^2 dp vs e^{-z}(1 + 1/z)/K_1(z)"};
  });

  run.check("clock_spectrum", "purity_closed_vs_angular", 1e-8, true, [&] {
    const auto s = clock::spectrum(history::MomentumDistribution::proper(1.0, 1.0));
    return Measured{rel(clock::purity(s), clock::proper_purity_closed(1.0, 1.0)),
                    "rest purity from angular quadrature vs Bessel form"};
  });

  run.check("clock_spectrum", "purity_energy_route", 1e-8, true, [&] {
    const auto s = clock::proper_spectrum(1.0, 1.0, 0.6);
    return Measured{rel(clock::purity_energy_route(s), clock::purity(s)), "p-route vs E-route purity"};
  });

  run.check("clock_spectrum", "purity_ratio_closed_vs_numeric", 1e-6, true, [&] {
    double dev = 0.0;
    for (double v : {0.3, 0.8})
      dev = std::max(dev, rel(clock::purity_ratio_numeric(1.0, 1.0, v), clock::purity_ratio(1.0, 1.0, v)));
    return Measured{dev, "R(v) closed vs angular quadrature, eps m = 1"};
  });

  run.check("clock_spectrum", "purity_ratio_monotone", 0.0, true, [&] {
    double worst = -std::numeric_limits<double>::infinity();
    for (double em : {0.1, 1.0, 10.0}) {
      double prev = 1.0;
      for (int i = 1; i <= 9; ++i) {
        const double r = clock::purity_ratio(em, 1.0, 0.1 * i);
        worst = std::max(worst, r - prev);
        prev = r;
      }
    }
    return Measured{worst, "max R(v_{i+1}) - R(v_i); negative means decreasing"};
  });

  run.check("clock_spectrum", "purity_ratio_gamma_limit", 1e-3, true, [&] {
    double dev = 0.0;
    for (int i = 1; i <= 9; ++i) {
      const double v = 0.1 * i;
      dev = std::max(dev, std::abs(clock::purity_ratio(1e-3, 1.0, v) - std::sqrt(1.0 - v * v)));
    }
    return Measured{dev, "|R - sqrt(1 - v^2)| at eps m = 1e-3"};
  });
}

void field_checks(Runner& run) {
  field::Lattice lat;
  lat.sites = 2000;
  lat.half_length = 40.0;
  lat.boundary = field::Boundary::periodic;
  const auto free = field::StaticPotential::free();

  std::vector<field::MassOrthogonalityRow> rows;
  run.check("external_field", "hellmann_feynman_free", 1e-3, true, [&] {
    rows = field::mass_orthogonality_check(free, 1.0, lat, 0, 5);
    double dev = 0.0;
    for (const auto& r : rows) dev = std::max(dev, r.discrepancy);
    return Measured{dev, "max |<beta> - dE/dm| over 5 levels, periodic, N = 2000"};
  });

  run.check("external_field", "free_m_over_E", 1e-3, true, [&] {
    if (rows.empty()) throw InternalError("no level data");
    // Periodic levels: cluster c holds k = +-2 pi c / (2 L).
    double dev = 0.0;
    for (const auto& r : rows) {
      const double k = pi * r.level / lat.half_length;
      dev = std::max(dev, std::abs(r.beta_expectation - 1.0 / std::sqrt(1.0 + k * k)));
    }
    return Measured{dev, "max |<beta> - m/E|, E = sqrt(k^2 + m^2), over 5 levels"};
  });

  run.check("external_field", "degenerate_overlap_free", 1e-6, true, [&] {
    const auto pair = field::degenerate_cross_mass_check(free, lat, 1, 1.0, 0);
    if (!pair) throw InternalError("no degenerate partner found");
    return Measured{pair->overlap, "sigma_3 overlap of level 1 (m = 1) and level 0 (m' = " +
                                       std::to_string(pair->m_prime) + ")"};
  });

  run.check("external_field", "well_hellmann_feynman", 1e-3, true, [&] {
    field::Lattice wall;
    wall.sites = 1000;
    wall.half_length = 10.0;
    const auto well = field::StaticPotential::square_well(0.5, 2.0);
    double dev = 0.0;
    for (const auto& r : field::mass_orthogonality_check(well, 1.0, wall, 0, 5)) dev = std::max(dev, r.discrepancy);
    return Measured{dev, "square well depth 0.5, half width 2, hard wall, N = 1000"};
  });
}

}  // namespace

bool Report::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.module + "." + c.name);
  return out;
}

std::string Report::to_json() const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["seed"] = options.seed;
  j["samples"] = options.samples;
  j["inject_fault"] = options.inject_fault;
  j["passed"] = all_passed();
  j["check_count"] = checks.size();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["module"] = c.module;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["comparison"] = c.below ? "<" : ">";
    e["threshold"] = c.threshold;
    e["seconds"] = c.seconds;
    e["detail"] = c.detail;
    // NaN is not representable in JSON.
    if (std::isfinite(c.value)) {
      e["value"] = c.value;
      e["margin"] = c.margin();
    } else {
      e["value"] = nullptr;
      e["margin"] = nullptr;
    }
    j["checks"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

Report run(const Options& opts) {
  if (!opts.inject_fault.empty() && opts.inject_fault != "spinor_sign") {
    throw DomainError("verify: unknown fault '" + opts.inject_fault + "'");
  }
  Report report;
  report.options = opts;
  Runner runner(report);
  spinor_checks(runner, opts);
  history_checks(runner, opts);
  lightcone_checks(runner, opts);
  clock_checks(runner);
  field_checks(runner);
  return report;
}

}  // namespace histdirac::verify
