#pragma once

// Hermitian banded eigensolver (numerics module).
//
// Eigenvalues come from LAPACK's zhbevx (band reduction plus bisection) and
// eigenvectors from banded inverse iteration, which keeps the cost linear in
// the matrix size per requested vector. Every returned pair is re-checked
// against the residual contract ||H v - E v|| < 1e-9.

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace histdirac::numerics {

using cplx = std::complex<double>;

/// Square complex matrix with entries restricted to |i - j| <= bandwidth.
/// Both triangles are stored so that assembly mistakes are detectable.
class BandedHermitian {
 public:
  BandedHermitian(int n, int bandwidth);

  int size() const noexcept { return n_; }
  int bandwidth() const noexcept { return kd_; }

  /// Accumulates v into entry (i, j). Entries outside the band throw InternalError.
  void add(int i, int j, cplx v);
  cplx at(int i, int j) const;

  /// max |A_ij - conj(A_ji)| over the band.
  double hermiticity_defect() const;
  /// max |A_ij| over the band.
  double max_abs() const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

 private:
  int index(int i, int j) const { return (kd_ + i - j) + (2 * kd_ + 1) * j; }

  int n_;
  int kd_;
  std::vector<cplx> band_;
};

/// Half-open energy window (lower, upper].
struct EigenWindow {
  double lower;
  double upper;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXcd vector;
  double residual = 0.0;
};

/// Eigenpairs with eigenvalue in `window`, ascending, at most `max_count`
/// (all if negative). Eigenvectors are orthonormal in the plain product.
///
/// Throws InternalError if the matrix is not Hermitian to 1e-12 (relative to
/// its largest entry) and SolverError on LAPACK failure or when a residual
/// exceeds 1e-9.
std::vector<EigenPair> eigensolve_banded(const BandedHermitian& h, EigenWindow window,
                                         int max_count = -1);

/// Eigenvalues only, same window semantics.
std::vector<double> eigenvalues_banded(const BandedHermitian& h, EigenWindow window);

}  // namespace histdirac::numerics
