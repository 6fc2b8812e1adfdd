#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "histdirac/errors.hpp"
#include "histdirac/lightcone_density.hpp"

using namespace histdirac;
using namespace histdirac::lightcone;
using std::numbers::pi;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("closed form agrees with quadrature") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  for (double eps : {0.1, 0.5, 1.0}) {
    for (int n = 0; n < 8; ++n) {
      const double x = u(rng), t = u(rng);
      const auto a = psi_closed(x, t, eps, 1.0);
      const auto b = psi_quadrature(x, t, eps, 1.0);
      worst = std::max({worst, rel(b.psi0, a.psi0), rel(b.psi1, a.psi1)});
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("both quadrature paths agree") {
  PsiQuadratureOptions real_axis, contour;
  real_axis.path = QuadraturePath::real_axis;
  contour.path = QuadraturePath::contour;
  for (auto [x, t] : {std::pair{0.7, 0.3}, {-1.5, 2.0}, {2.0, -0.5}}) {
    const auto a = psi_quadrature(x, t, 0.3, 1.0, real_axis);
    const auto b = psi_quadrature(x, t, 0.3, 1.0, contour);
    CHECK(rel(a.psi0, b.psi0) < 1e-9);
    CHECK(rel(a.psi1, b.psi1) < 1e-9);
  }
  // Small eps: only the contour is practical; compare with the closed form.
  const auto c = psi_quadrature(1.2, 3.0, 1e-3, 1.0);
  const auto d = psi_closed(1.2, 3.0, 1e-3, 1.0);
  CHECK(rel(c.psi0, d.psi0) < 1e-8);
  CHECK_THROWS_AS(psi_quadrature(1.0, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("positivity: F > 1") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> xt(-10.0, 10.0), e(0.0, 1.0);
  int violations = 0;
  for (int n = 0; n < 10000; ++n) {
    const double x = xt(rng), t = xt(rng), eps = 2.0 * (1.0 - e(rng));
    if (!(F_ratio(x, t, eps) > 1.0)) ++violations;
  }
  CHECK(violations == 0);
  CHECK(std::isinf(F_ratio(0.0, 1.0, 0.5)));
  // F is |psi_0 / psi_1|^2 of the closed form.
  const auto p = psi_closed(0.8, -0.4, 0.2, 1.0);
  CHECK(std::abs(F_ratio(0.8, -0.4, 0.2) - std::norm(p.psi0 / p.psi1)) < 1e-12 * F_ratio(0.8, -0.4, 0.2));
}

TEST_CASE("limit densities") {
  CHECK(std::abs(invariant_density(0.0, 2.0) - pi / 2.0) < 1e-15);
  CHECK(std::abs(dirac_density(0.0, 2.0, 1.0) - pi / 2.0) < 1e-15);
  CHECK(invariant_density(3.0, 1.0) == 0.0);
  CHECK(invariant_density(-3.0, -1.0) == 0.0);
  CHECK(dirac_density(1.0, 2.0, 1.0) > invariant_density(1.0, 2.0));
  CHECK(invariant_density(0.3, -1.0) == doctest::Approx(invariant_density(0.3, 1.0)));
  CHECK_THROWS_AS(invariant_density(1.0, 1.0), SingularityError);
  CHECK_THROWS_AS(psi_closed(1.0, -1.0, 0.0, 1.0), SingularityError);
}

TEST_CASE("regularized densities approach the limit") {
  for (auto [x, t] : {std::pair{0.5, 2.0}, {-1.0, 3.0}, {0.0, -2.5}}) {
    const double lim = invariant_density(x, t);
    CHECK(std::abs(regularized_invariant_density(x, t, 1e-4, 1.0) - lim) / lim < 1e-3);
  }
  // Outside the cone the regularized density is O(eps).
  const double a = regularized_invariant_density(2.0, 0.5, 1e-3, 1.0);
  const double b = regularized_invariant_density(2.0, 0.5, 1e-4, 1.0);
  CHECK(std::abs(a / b - 10.0) < 0.1);
  // At t = 0 the exact value is pi eps e^{-2w} / w^2 with w = sqrt(x^2 + eps^2).
  const double eps = 0.2, x = 0.7, w = std::hypot(x, eps);
  CHECK(std::abs(regularized_invariant_density(x, 0.0, eps, 1.0) - pi * eps * std::exp(-2 * w) / (w * w)) < 1e-14);
}

TEST_CASE("cross-mass and tau densities") {
  const auto c = cross_mass_density(0.3, 1.5, 1.0, 1.0);
  CHECK(std::abs(c - cplx(invariant_density(0.3, 1.5))) < 1e-15);
  const auto d = cross_mass_density(0.3, 1.5, 1.0, 1.4);
  CHECK(std::abs(std::abs(d) - invariant_density(0.3, 1.5)) < 1e-14);
  CHECK(cross_mass_density(2.0, 1.0, 1.0, 1.4) == cplx(0.0));
  // Past and future cone carry opposite phases.
  CHECK(std::abs(cross_mass_density(0.3, -1.5, 1.0, 1.4) - std::conj(d)) < 1e-14);

  const auto sharp = history::MassDistribution::sharp({{1.0, 1.0}});
  CHECK(std::abs(tau_density(0.2, 1.0, 0.4, sharp) - invariant_density(0.2, 1.0)) < 1e-14);
  const auto g = history::MassDistribution::gaussian(1.0, 0.1);
  CHECK(tau_density(3.0, 1.0, 0.0, g) == 0.0);
  // At x = 0 the pulse |Phi(tau - |t|)|^2 peaks at t = tau.
  double best_t = 0.0, best = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double t = 0.025 * i;
    const double v = tau_density(0.0, t, 5.0, g) * t / pi;
    if (v > best) best = v, best_t = t;
  }
  CHECK(std::abs(best_t - 5.0) < 0.03);
}

TEST_CASE("regularized tau density of a sharp superposition") {
  const auto masses = history::MassDistribution::sharp({{1.0, 0.6}, {1.3, 0.8}});
  const double x = 0.4, t = 1.1, tau = 0.7, eps = 0.3;
  const auto a = psi_closed(x, t, eps, 1.0), b = psi_closed(x, t, eps, 1.3);
  const cplx p0 = 0.6 * std::exp(cplx(0, 1.0 * tau)) * a.psi0 + 0.8 * std::exp(cplx(0, 1.3 * tau)) * b.psi0;
  const cplx p1 = 0.6 * std::exp(cplx(0, 1.0 * tau)) * a.psi1 + 0.8 * std::exp(cplx(0, 1.3 * tau)) * b.psi1;
  const double ref = std::norm(p0) - std::norm(p1);
  CHECK(std::abs(regularized_tau_density(x, t, tau, eps, masses) - ref) < 1e-13 * std::abs(ref));
}

TEST_CASE("continuity with the tau current") {
  const auto masses = history::MassDistribution::sharp({{1.0, 0.8}, {1.6, 0.6}});
  const auto r = continuity_residual(masses, 0.4, 0.5, {-1.3, -0.2, 0.6, 2.2}, {-1.0, 0.3, 1.4});
  CHECK(r.scale > 0.0);
  CHECK(r.relative() < 1e-5);
}

TEST_CASE("localization width shrinks with eps") {
  const double w1 = localization_width(0.2, 1.0);
  const double w2 = localization_width(0.1, 1.0);
  const double w3 = localization_width(0.05, 1.0);
  CHECK(w1 > w2);
  CHECK(w2 > w3);
  CHECK(w1 / w2 > 1.0);
  CHECK(w1 / w2 < 4.0);
  CHECK(w2 / w3 < 4.0);
}

TEST_CASE("density grids") {
  DensityParams p;
  const GridAxis x{-4.92, 0.12, 83}, t{-4.96, 0.12, 84};
  const auto g = make_density_grid(p, x, t);
  CHECK(g.re.size() == 83u * 84u);
  CHECK(g.im.empty());
  for (int i = 0; i < x.count; ++i)
    for (int j = 0; j < t.count; ++j) {
      const double xi = x.at(i), tj = t.at(j);
      const double ref = tj * tj > xi * xi ? pi / std::sqrt(tj * tj - xi * xi) : 0.0;
      REQUIRE(std::abs(g.value(i, j) - ref) <= 1e-14 * ref);
    }
  // (0, 2) is a node.
  CHECK(std::abs(g.value(41, 58) - pi / 2.0) < 1e-13);

  p.kind = DensityKind::cross_mass;
  p.m_prime = 1.2;
  const auto c = make_density_grid(p, {0.1, 0.5, 3}, {1.0, 0.5, 3});
  CHECK(c.im.size() == 9u);

  // A node on the light cone is rejected for limit grids.
  p.kind = DensityKind::invariant;
  CHECK_THROWS_AS(make_density_grid(p, {0.0, 1.0, 3}, {0.0, 1.0, 3}), SingularityError);

  // The parallel evaluation is deterministic.
  p.method = DensityMethod::closed;
  p.eps = 0.01;
  const auto a1 = make_density_grid(p, {-2.0, 0.25, 17}, {-2.1, 0.3, 15});
  const auto a2 = make_density_grid(p, {-2.0, 0.25, 17}, {-2.1, 0.3, 15});
  CHECK(a1.re == a2.re);

  p.kind = DensityKind::tau;
  CHECK_THROWS_AS(make_density_grid(p, x, t), DomainError);
}

TEST_CASE("light-cone dichotomy at eps = 1e-4") {
  double peak = 0.0, space = 0.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 21; ++j) {
      const double x = -4.75 + 0.5 * i, t = -5.0 + 0.5 * j;
      const double v = std::abs(regularized_invariant_density(x, t, 1e-4, 1.0));
      if (t * t > x * x) peak = std::max(peak, v);
      if (std::abs(x) - std::abs(t) > 0.5) space = std::max(space, v);
    }
  CHECK(space < 1e-3 * peak);
}

TEST_CASE("F does not depend on m") {
  double worst = 0.0;
  for (auto [x, t, eps] : {std::tuple{0.7, 0.4, 0.5}, {-2.0, 1.1, 1.0}, {1.3, -2.2, 0.2}}) {
    const auto a = psi_quadrature(x, t, eps, 1.0), b = psi_quadrature(x, t, eps, 3.0);
    const double fa = std::norm(a.psi0 / a.psi1), fb = std::norm(b.psi0 / b.psi1);
    worst = std::max(worst, std::abs(fa - fb));
    CHECK(std::abs(fa - F_ratio(x, t, eps)) < 1e-9 * fa);
  }
  CHECK(worst < 1e-10);
}
