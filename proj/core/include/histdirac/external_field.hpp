#pragma once

// One-dimensional Dirac particle in a static potential on a lattice:
//
//   H(m) = sigma_1 (p + e A_1) + sigma_3 (m + W) + e A_0,   p = -i d/dx,
//
// with central differences for p and the Wilson term W = -(r h / 2) d^2/dx^2,
// whose momentum-space form (r / h)(1 - cos k h) lifts the doubler at k = pi/h.
// Since dH/dm = sigma_3 exactly, the lattice obeys the mass identities
//   <phi_k| sigma_3 |phi_k> = dE_k / dm                         (Hellmann-Feynman)
//   (m - m') <phi'| sigma_3 |phi> = (E - E') <phi'|phi>
// so degenerate states of different mass are sigma_3-orthogonal.
//
// Vectors are interleaved (site j, component s) -> 2 * pos(j) + s, where pos
// is the site ordering of the lattice (see Lattice::position).

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "histdirac/eigensolver.hpp"

namespace histdirac::field {

using numerics::EigenPair;
using numerics::EigenWindow;

struct StaticPotential {
  std::function<double(double)> a0;  ///< A_0(x)
  std::function<double(double)> a1;  ///< A_1(x)
  double coupling = 1.0;             ///< e
  std::string name;
  std::map<std::string, double> parameters;

  static StaticPotential free();
  /// e A_0 = -depth for |x| < half_width, zero outside.
  static StaticPotential square_well(double depth, double half_width);
  static StaticPotential constant(double a0, double a1 = 0.0, double coupling = 1.0);
};

enum class Boundary {
  periodic,   ///< x_j = -L + j h, h = 2L / N
  hard_wall,  ///< x_j = -L + (j + 1) h, h = 2L / (N + 1); both components vanish at +-L
};
std::string to_string(Boundary b);

struct Lattice {
  int sites = 2000;
  double half_length = 10.0;
  Boundary boundary = Boundary::hard_wall;
  double wilson_r = 1.0;

  double spacing() const;
  double x(int site) const;
  /// Row of the site in the matrix (periodic lattices interleave both ends
  /// so that the wrap-around coupling stays inside a narrow band).
  int position(int site) const;
  int bandwidth() const;
};

struct DiscreteHamiltonian {
  numerics::BandedHermitian matrix;
  Lattice lattice;
  double mass = 1.0;
  std::vector<int> site_of_position;

  /// Component s of `v` at `site`.
  std::complex<double> component(const Eigen::VectorXcd& v, int site, int s) const {
    return v[2 * lattice.position(site) + s];
  }
};

/// ResolutionError unless m h <= 0.2 and max |e A| h <= 0.2; InternalError if
/// the assembled matrix is not Hermitian.
DiscreteHamiltonian build_hamiltonian(const StaticPotential& pot, double m, const Lattice& lattice);

/// Eigenpairs in the window, ascending, residual < 1e-9 (SolverError otherwise).
std::vector<EigenPair> eigensolve(const DiscreteHamiltonian& h, EigenWindow window, int count = -1);

/// integral phi-bar' phi dx = sum_j conj(phi'_j) sigma_3 phi_j.
std::complex<double> beta_overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// A positive-energy level: eigenvalues closer than 1e-8 (relative) are
/// grouped, so free periodic +-k pairs form one level of degeneracy 2.
struct Level {
  double energy = 0.0;
  std::vector<Eigen::VectorXcd> vectors;
};

/// The `count` lowest positive-energy levels (index 0 = lowest).
std::vector<Level> positive_levels(const DiscreteHamiltonian& h, int count);

struct MassOrthogonalityRow {
  int level = 0;
  int degeneracy = 1;
  double energy = 0.0;
  double beta_expectation = 0.0;  ///< integral phi-bar phi (averaged over the level)
  double dE_dm = 0.0;             ///< Richardson-extrapolated central difference
  double discrepancy = 0.0;       ///< |beta_expectation - dE_dm|
};

struct MassOrthogonalityOptions {
  double relative_step = 1e-4;  ///< delta m = relative_step * m
};

/// Levels first_level .. first_level + count - 1. TrackingError when a level
/// cannot be followed unambiguously across m +- delta m.
std::vector<MassOrthogonalityRow> mass_orthogonality_check(const StaticPotential& pot, double m,
                                                           const Lattice& lattice, int first_level,
                                                           int count,
                                                           const MassOrthogonalityOptions& opts = {});

/// Largest singular value of the sigma_3 cross-overlap matrix between level
/// k at mass m and level k' at mass m' (a basis-independent |integral phi-bar' phi|).
double cross_mass_overlap(const StaticPotential& pot, const Lattice& lattice, int k, double m, int k_prime,
                          double m_prime);

struct DegeneratePair {
  int k = 0;
  int k_prime = 0;
  double m = 0.0;
  double m_prime = 0.0;
  double energy = 0.0;            ///< E_k(m)
  double energy_mismatch = 0.0;   ///< |E_k'(m') - E_k(m)| at the root
  double overlap = 0.0;           ///< as in cross_mass_overlap
  double norm_overlap = 0.0;      ///< same with the plain product
  int root_evaluations = 0;
};

struct DegenerateSearch {
  double m_lower = 0.0;  ///< search bracket for m' (defaults: m and 8 m)
  double m_upper = 0.0;
  double tolerance = 1e-13;
};

/// Finds m' with E_k'(m') = E_k(m) in the bracket and returns the overlap of
/// the two states; nullopt when E_k'(m') - E_k(m) has no sign change there.
std::optional<DegeneratePair> degenerate_cross_mass_check(const StaticPotential& pot, const Lattice& lattice,
                                                          int k, double m, int k_prime,
                                                          const DegenerateSearch& search = {});

}  // namespace histdirac::field
