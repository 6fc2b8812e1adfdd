#pragma once

namespace histdirac::special {

/// Modified Bessel function of the second kind K_nu(z) for nu in {0, 1, 2}.
/// Power series for z <= 2, Steed's continued fraction above.
/// DomainError for z <= 0 or an unsupported order.
double bessel_k(int nu, double z);

/// exp(z) * K_nu(z), finite for large z.
double bessel_k_scaled(int nu, double z);

}  // namespace histdirac::special
