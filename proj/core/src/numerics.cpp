#include "histdirac/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <lapacke.h>

namespace histdirac::numerics {

namespace detail {

const std::vector<double>& Gk21::abscissae() {
  static const std::vector<double> x = [] {
    const auto& a = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
    return std::vector<double>(a.begin(), a.end());
  }();
  return x;
}

const std::vector<double>& Gk21::kronrod_weights() {
  static const std::vector<double> w = [] {
    const auto& a = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
    return std::vector<double>(a.begin(), a.end());
  }();
  return w;
}

const std::vector<double>& Gk21::gauss_weights() {
  static const std::vector<double> w = [] {
    const auto& a = boost::math::quadrature::gauss<double, 10>::weights();
    return std::vector<double>(a.begin(), a.end());
  }();
  return w;
}

}  // namespace detail

std::optional<double> find_root(const std::function<double(double)>& f, double lo, double hi,
                                double tol, int max_iterations) {
  if (!(lo < hi)) throw DomainError("find_root: degenerate bracket");
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) return std::nullopt;
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  boost::uintmax_t iterations = static_cast<boost::uintmax_t>(max_iterations);
  const auto bracket =
      boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iterations);
  const double a = bracket.first;
  const double b = bracket.second;
  // Return the endpoint with the smaller residual.
  const double fa = f(a);
  const double fb = f(b);
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 * (first eigenvector component)^2.
GaussRule golub_welsch(std::vector<double> diag, std::vector<double> off, double mu0) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> z(static_cast<std::size_t>(n) * n);
  const lapack_int info =
      LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, diag.data(), off.data(), z.data(), n);
  if (info != 0) throw SolverError("golub_welsch: dstev info=" + std::to_string(info));
  GaussRule rule;
  rule.nodes = diag;
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double v0 = z[static_cast<std::size_t>(j) * n];
    rule.weights[static_cast<std::size_t>(j)] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

GaussRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: n must be positive");
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off(static_cast<std::size_t>(std::max(n - 1, 1)), 0.0);
  for (int k = 1; k < n; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(0.5 * k);
  return golub_welsch(std::move(diag), std::move(off), std::sqrt(M_PI));
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off(static_cast<std::size_t>(std::max(n - 1, 1)), 0.0);
  for (int k = 1; k < n; ++k) {
    off[static_cast<std::size_t>(k - 1)] = k / std::sqrt(4.0 * k * k - 1.0);
  }
  return golub_welsch(std::move(diag), std::move(off), 2.0);
}

}  // namespace histdirac::numerics
