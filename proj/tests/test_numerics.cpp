#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "histdirac/eigensolver.hpp"
#include "histdirac/errors.hpp"
#include "histdirac/numerics.hpp"

using namespace histdirac;
using namespace histdirac::numerics;
using std::numbers::pi;

TEST_CASE("gauss-kronrod integrates smooth functions") {
  auto r = integrate([](double x) { return std::exp(-x) * std::cos(3 * x); }, 0.0, 2.0);
  const double ref = (1.0 - std::exp(-2.0) * (std::cos(6.0) - 3.0 * std::sin(6.0))) / 10.0;
  CHECK(std::abs(r.value - ref) < 1e-14);
  CHECK(r.evaluations > 0);

  auto poly = integrate([](double x) { return x * x * x * x * x; }, -1.0, 3.0);
  CHECK(poly.value == doctest::Approx((729.0 - 1.0) / 6.0).epsilon(1e-15));

  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("complex and vector integrands") {
  auto c = integrate([](double x) { return std::exp(std::complex<double>(0.0, x)); }, 0.0, pi);
  CHECK(std::abs(c.value - std::complex<double>(0.0, 2.0)) < 1e-14);

  auto v = integrate([](double x) { return Eigen::Vector2d(x, x * x); }, 0.0, 1.0);
  CHECK(std::abs(v.value[0] - 0.5) < 1e-15);
  CHECK(std::abs(v.value[1] - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("semi-infinite ranges") {
  auto g = integrate_semi_infinite([](double x) { return std::exp(-x * x); }, 0.0, 1.0);
  CHECK(std::abs(g.value - std::sqrt(pi) / 2.0) < 1e-14);
  CHECK(std::isfinite(g.cutoff));

  QuadratureSpec chunks;
  chunks.transform = Transform::none;
  auto e = integrate_semi_infinite([](double x) { return std::exp(-x); }, 1.0, 2.0, chunks);
  CHECK(std::abs(e.value - std::exp(-1.0)) < 1e-14);

  // Power-law tail 1 / (1 + x^2).
  auto l = integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
  CHECK(std::abs(l.value - pi / 2.0) < 1e-10);
}

TEST_CASE("accuracy failure carries the best estimate") {
  QuadratureSpec spec;
  spec.max_subdivisions = 20;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 0.0;
  try {
    integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, spec);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(e.best_estimate() == doctest::Approx(2.0).epsilon(1e-2));
  }
}

TEST_CASE("solid angle and ball") {
  auto one = integrate_solid_angle([](const Vec3&) { return 1.0; });
  CHECK(std::abs(one.value - 4.0 * pi) < 1e-12);
  auto z2 = integrate_solid_angle([](const Vec3& n) { return n[2] * n[2]; });
  CHECK(std::abs(z2.value - 4.0 * pi / 3.0) < 1e-12);
  auto x2 = integrate_solid_angle([](const Vec3& n) { return n[0] * n[0] * n[1] * n[1]; });
  CHECK(std::abs(x2.value - 4.0 * pi / 15.0) < 1e-12);

  // Off-centre Gaussian: pi^{3/2} independent of the expansion point.
  const Vec3 c(0.4, -0.2, 0.1);
  auto g = integrate_ball([&](const Vec3& p) { return std::exp(-(p - c).squaredNorm()); }, Vec3::Zero(), 1.0);
  CHECK(std::abs(g.value - std::pow(pi, 1.5)) < 1e-9);
}

TEST_CASE("root finding") {
  auto r = find_root([](double x) { return std::cos(x); }, 0.0, 2.0, 1e-14);
  REQUIRE(r.has_value());
  CHECK(std::abs(*r - pi / 2.0) < 1e-13);
  CHECK_FALSE(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0).has_value());
  CHECK_THROWS_AS(find_root([](double x) { return x; }, 1.0, 1.0), DomainError);
}

TEST_CASE("gauss rules") {
  const auto gh = gauss_hermite(20);
  double m4 = 0.0, m0 = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    m0 += gh.weights[i];
    m4 += gh.weights[i] * std::pow(gh.nodes[i], 4);
  }
  CHECK(std::abs(m0 - std::sqrt(pi)) < 1e-13);
  CHECK(std::abs(m4 - 0.75 * std::sqrt(pi)) < 1e-13);

  const auto gl = gauss_legendre(10);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 18);
  CHECK(std::abs(s - 2.0 / 19.0) < 1e-14);
}

namespace {

BandedHermitian random_banded(int n, int kd, unsigned seed, Eigen::MatrixXcd* dense) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  BandedHermitian h(n, kd);
  dense->setZero(n, n);
  for (int i = 0; i < n; ++i) {
    const double d = g(rng);
    h.add(i, i, d);
    (*dense)(i, i) = d;
    for (int j = i + 1; j <= std::min(n - 1, i + kd); ++j) {
      const std::complex<double> v(g(rng), g(rng));
      h.add(i, j, v);
      h.add(j, i, std::conj(v));
      (*dense)(i, j) = v;
      (*dense)(j, i) = std::conj(v);
    }
  }
  return h;
}

}  // namespace

TEST_CASE("banded eigensolver agrees with a dense solver") {
  Eigen::MatrixXcd dense;
  const auto h = random_banded(240, 4, 7u, &dense);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(dense);
  const auto pairs = eigensolve_banded(h, {-1.0, 1.5});
  std::vector<double> expected;
  for (int i = 0; i < ref.eigenvalues().size(); ++i) {
    const double e = ref.eigenvalues()[i];
    if (e > -1.0 && e <= 1.5) expected.push_back(e);
  }
  REQUIRE(pairs.size() == expected.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(std::abs(pairs[i].value - expected[i]) < 1e-11);
    CHECK(pairs[i].residual < 1e-9);
    CHECK(std::abs(pairs[i].vector.norm() - 1.0) < 1e-12);
    for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(pairs[j].vector.dot(pairs[i].vector)) < 1e-9);
  }
  const auto values = eigenvalues_banded(h, {-1.0, 1.5});
  CHECK(values.size() == expected.size());

  const auto first3 = eigensolve_banded(h, {-1.0, 1.5}, 3);
  CHECK(first3.size() == 3);
}

TEST_CASE("degenerate eigenvalues get orthogonal vectors") {
  // Two identical decoupled blocks: every eigenvalue is doubly degenerate.
  const int n = 60;
  BandedHermitian h(2 * n, 2);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < 2; ++b) {
      h.add(2 * i + b, 2 * i + b, 2.0);
      if (i + 1 < n) {
        h.add(2 * i + b, 2 * (i + 1) + b, -1.0);
        h.add(2 * (i + 1) + b, 2 * i + b, -1.0);
      }
    }
  }
  const auto pairs = eigensolve_banded(h, {0.0, 0.5});
  REQUIRE(pairs.size() % 2 == 0);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(pairs[j].vector.dot(pairs[i].vector)) < 1e-9);
}

TEST_CASE("banded matrix guards") {
  BandedHermitian h(10, 2);
  CHECK_THROWS_AS(h.add(0, 5, 1.0), InternalError);
  h.add(0, 1, std::complex<double>(0.0, 1.0));
  h.add(1, 0, std::complex<double>(0.0, 1.0));  // not the conjugate
  CHECK(h.hermiticity_defect() == doctest::Approx(2.0));
  CHECK_THROWS_AS(eigensolve_banded(h, {-10.0, 10.0}), InternalError);
}
