#include "histdirac/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <lapacke.h>

#include "histdirac/errors.hpp"

namespace histdirac::numerics {

BandedHermitian::BandedHermitian(int n, int bandwidth)
    : n_(n), kd_(bandwidth),
      band_(static_cast<std::size_t>(2 * bandwidth + 1) * static_cast<std::size_t>(n)) {
  if (n <= 0 || bandwidth < 0 || bandwidth >= n) {
    throw DomainError("BandedHermitian: need n > 0 and 0 <= bandwidth < n");
  }
}

void BandedHermitian::add(int i, int j, cplx v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || std::abs(i - j) > kd_) {
    throw InternalError("BandedHermitian::add: entry (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") outside band " + std::to_string(kd_));
  }
  band_[static_cast<std::size_t>(index(i, j))] += v;
}

cplx BandedHermitian::at(int i, int j) const {
  if (std::abs(i - j) > kd_) return {};
  return band_[static_cast<std::size_t>(index(i, j))];
}

double BandedHermitian::hermiticity_defect() const {
  double worst = 0.0;
  for (int j = 0; j < n_; ++j) {
    for (int i = std::max(0, j - kd_); i <= j; ++i) {
      worst = std::max(worst, std::abs(at(i, j) - std::conj(at(j, i))));
    }
  }
  return worst;
}

double BandedHermitian::max_abs() const {
  double worst = 0.0;
  for (const auto& v : band_) worst = std::max(worst, std::abs(v));
  return worst;
}

Eigen::VectorXcd BandedHermitian::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    const cplx xj = x[j];
    const int lo = std::max(0, j - kd_);
    const int hi = std::min(n_ - 1, j + kd_);
    for (int i = lo; i <= hi; ++i) y[i] += band_[static_cast<std::size_t>(index(i, j))] * xj;
  }
  return y;
}

namespace {

void check_hermitian(const BandedHermitian& h) {
  const double scale = std::max(1.0, h.max_abs());
  const double defect = h.hermiticity_defect();
  if (defect > 1e-12 * scale) {
    throw InternalError("eigensolve_banded: matrix is not Hermitian (defect " +
                        std::to_string(defect) + ")");
  }
}

// Upper-triangle LAPACK band storage, column major, ldab = kd + 1.
std::vector<lapack_complex_double> pack_upper(const BandedHermitian& h) {
  const int n = h.size();
  const int kd = h.bandwidth();
  std::vector<lapack_complex_double> ab(static_cast<std::size_t>(kd + 1) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      // Average with the mirrored entry; the guard above bounds the difference.
      const cplx v = 0.5 * (h.at(i, j) + std::conj(h.at(j, i)));
      ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(kd + 1) * j] =
          lapack_make_complex_double(v.real(), v.imag());
    }
  }
  return ab;
}

std::vector<double> run_zhbevx(const BandedHermitian& h, EigenWindow window) {
  if (!(window.lower < window.upper)) throw DomainError("eigensolve_banded: empty window");
  check_hermitian(h);
  const int n = h.size();
  const int kd = h.bandwidth();
  auto ab = pack_upper(h);
  std::vector<double> values(static_cast<std::size_t>(n));
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  lapack_complex_double dummy = lapack_make_complex_double(0.0, 0.0);
  lapack_complex_double qdummy = lapack_make_complex_double(0.0, 0.0);
  const lapack_int info =
      LAPACKE_zhbevx(LAPACK_COL_MAJOR, 'N', 'V', 'U', n, kd, ab.data(), kd + 1, &qdummy, 1, window.lower,
                     window.upper, 0, 0, abstol, &found, values.data(), &dummy, 1, ifail.data());
  if (info != 0) {
    throw SolverError("eigensolve_banded: zhbevx info=" + std::to_string(info) +
                      (info > 0 ? " (failed to converge)" : " (bad argument)"));
  }
  values.resize(static_cast<std::size_t>(found));
  return values;
}

// LU factorization of H - shift in LAPACK general band storage.
struct ShiftedLu {
  int n;
  int kd;
  std::vector<lapack_complex_double> ab;
  std::vector<lapack_int> pivots;

  ShiftedLu(const BandedHermitian& h, double shift) : n(h.size()), kd(h.bandwidth()) {
    const int ldab = 3 * kd + 1;
    ab.assign(static_cast<std::size_t>(ldab) * n, lapack_make_complex_double(0.0, 0.0));
    pivots.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      for (int i = std::max(0, j - kd); i <= std::min(n - 1, j + kd); ++i) {
        cplx v = h.at(i, j);
        if (i == j) v -= shift;
        ab[static_cast<std::size_t>(2 * kd + i - j) + static_cast<std::size_t>(ldab) * j] =
            lapack_make_complex_double(v.real(), v.imag());
      }
    }
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, ab.data(), ldab, pivots.data());
    if (info < 0) throw SolverError("eigensolve_banded: zgbtrf bad argument " + std::to_string(info));
    // info > 0 (exactly singular pivot) is handled by the caller's shift perturbation.
    singular = info > 0;
  }

  bool singular = false;

  void solve(Eigen::VectorXcd& x) const {
    const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, ab.data(), 3 * kd + 1,
                                           pivots.data(),
                                           reinterpret_cast<lapack_complex_double*>(x.data()), n);
    if (info != 0) throw SolverError("eigensolve_banded: zgbtrs info=" + std::to_string(info));
  }
};

// Inverse iteration for the eigenvector of `value`, orthogonal to `previous`
// (the already computed vectors of nearby eigenvalues).
Eigen::VectorXcd inverse_iteration(const BandedHermitian& h, double value, double scale,
                                   const std::vector<const Eigen::VectorXcd*>& previous, unsigned seed,
                                   double& residual, int& iterations) {
  const int n = h.size();
  double shift = value;
  for (int attempt = 0; attempt < 8; ++attempt) {
    ShiftedLu lu(h, shift);
    if (lu.singular) {
      shift = value + scale * 1e-14 * (attempt + 1);
      continue;
    }
    std::mt19937_64 rng(seed + 7919u * attempt);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) x[i] = cplx(u(rng), u(rng));
    x.normalize();
    for (iterations = 1; iterations <= 12; ++iterations) {
      for (const auto* q : previous) x -= q->dot(x) * (*q);
      lu.solve(x);
      for (const auto* q : previous) x -= q->dot(x) * (*q);
      const double nrm = x.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
      x /= nrm;
      residual = (h.apply(x) - value * x).norm();
      if (residual < 1e-12 * scale && iterations >= 2) return x;
    }
    if (residual < 1e-9) return x;
    shift = value + scale * 1e-13 * (attempt + 1);
  }
  throw SolverError("eigensolve_banded: inverse iteration did not converge for eigenvalue " +
                    std::to_string(value) + " (residual " + std::to_string(residual) + ", " +
                    std::to_string(iterations) + " iterations)");
}

}  // namespace

std::vector<EigenPair> eigensolve_banded(const BandedHermitian& h, EigenWindow window,
                                         int max_count) {
  const auto values = run_zhbevx(h, window);
  int keep = static_cast<int>(values.size());
  if (max_count >= 0) keep = std::min(keep, max_count);
  const double scale = std::max(1.0, h.max_abs());
  // Vectors of eigenvalues closer than this are explicitly orthogonalized.
  const double cluster = 1e-6 * scale;
  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(keep));
  for (int k = 0; k < keep; ++k) {
    EigenPair p;
    p.value = values[static_cast<std::size_t>(k)];
    std::vector<const Eigen::VectorXcd*> previous;
    for (const auto& q : pairs) {
      if (std::abs(q.value - p.value) < cluster) previous.push_back(&q.vector);
    }
    int iterations = 0;
    p.vector = inverse_iteration(h, p.value, scale, previous, 12345u + 31u * static_cast<unsigned>(k),
                                 p.residual, iterations);
    if (!(p.residual < 1e-9)) {
      throw SolverError("eigensolve_banded: residual " + std::to_string(p.residual) +
                        " exceeds 1e-9 for eigenvalue " + std::to_string(p.value));
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<double> eigenvalues_banded(const BandedHermitian& h, EigenWindow window) {
  return run_zhbevx(h, window);
}

}  // namespace histdirac::numerics
