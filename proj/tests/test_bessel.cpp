#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "histdirac/bessel.hpp"
#include "histdirac/errors.hpp"

using namespace histdirac;

// boost::math::cyl_bessel_k is used only here, as an independent oracle.
TEST_CASE("K_nu against boost") {
  for (int nu = 0; nu <= 2; ++nu) {
    for (double z : {1e-6, 1e-3, 0.05, 0.5, 1.0, 1.999, 2.0, 2.001, 3.7, 10.0, 50.0, 300.0}) {
      const double ref = boost::math::cyl_bessel_k(nu, z);
      const double got = special::bessel_k(nu, z);
      CAPTURE(nu);
      CAPTURE(z);
      if (ref == 0.0) {
        CHECK(got < 1e-300);
      } else {
        CHECK(std::abs(got - ref) / ref < 2e-14);
      }
    }
  }
}

TEST_CASE("scaled form stays finite for large arguments") {
  for (int nu = 0; nu <= 2; ++nu) {
    const double z = 2000.0;
    // e^z K_nu(z) ~ sqrt(pi / 2z) (1 + (4 nu^2 - 1) / (8 z))
    const double asym = std::sqrt(M_PI / (2 * z)) * (1.0 + (4.0 * nu * nu - 1.0) / (8.0 * z));
    CHECK(std::abs(special::bessel_k_scaled(nu, z) - asym) / asym < 1e-6);
  }
}

TEST_CASE("recurrence K_2 = K_0 + 2 K_1 / z") {
  for (double z : {0.01, 0.3, 1.5, 2.5, 7.0}) {
    const double lhs = special::bessel_k(2, z);
    const double rhs = special::bessel_k(0, z) + 2.0 * special::bessel_k(1, z) / z;
    CHECK(std::abs(lhs - rhs) / lhs < 1e-14);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(special::bessel_k(0, 0.0), DomainError);
  CHECK_THROWS_AS(special::bessel_k(1, -1.0), DomainError);
  CHECK_THROWS_AS(special::bessel_k(3, 1.0), DomainError);
  CHECK_THROWS_AS(special::bessel_k_scaled(0, std::nan("")), DomainError);
}
