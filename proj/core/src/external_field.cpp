#include "histdirac/external_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "histdirac/errors.hpp"
#include "histdirac/numerics.hpp"

namespace histdirac::field {
namespace {

using cplx = std::complex<double>;

constexpr double kMaxStep = 0.2;  // upper bound for m h and |e A| h

std::vector<std::vector<int>> cluster_indices(const std::vector<double>& values) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    const double tol = 1e-8 * std::max(1.0, std::abs(values[i]));
    if (!out.empty() && std::abs(values[i] - values[out.back().back()]) < tol) {
      out.back().push_back(i);
    } else {
      out.push_back({i});
    }
  }
  return out;
}

// Upper window edge that contains at least `count` complete clusters.
double window_for(const DiscreteHamiltonian& h, int count, std::vector<double>* values_out) {
  double top = h.mass + 1.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    auto values = numerics::eigenvalues_banded(h.matrix, {0.0, top});
    auto clusters = cluster_indices(values);
    if (static_cast<int>(clusters.size()) > count) {
      const double last = values[clusters[count - 1].back()];
      const double next = values[clusters[count].front()];
      if (values_out) {
        values_out->assign(values.begin(), values.begin() + clusters[count - 1].back() + 1);
      }
      return 0.5 * (last + next);
    }
    top *= 2.0;
  }
  throw SolverError("positive_levels: could not find the requested number of positive levels");
}

double level_energy(const DiscreteHamiltonian& h, int k) {
  std::vector<double> values;
  window_for(h, k + 1, &values);
  const auto clusters = cluster_indices(values);
  double e = 0.0;
  for (int i : clusters[k]) e += values[i];
  return e / clusters[k].size();
}

double level_beta(const Level& l) {
  double sum = 0.0;
  for (const auto& v : l.vectors) sum += beta_overlap(v, v).real();
  return sum / l.vectors.size();
}

// Subspace overlap |P_b V_a|^2 / dim(a).
double subspace_overlap(const Level& a, const Level& b) {
  double sum = 0.0;
  for (const auto& va : a.vectors)
    for (const auto& vb : b.vectors) sum += std::norm(vb.dot(va));
  return sum / a.vectors.size();
}

double tracked_energy(const Level& reference, const std::vector<Level>& candidates, double m_shifted, int level) {
  double best = -1.0, second = -1.0;
  int best_i = -1;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    const double ov = subspace_overlap(reference, candidates[i]);
    if (ov > best) {
      second = best;
      best = ov;
      best_i = i;
    } else if (ov > second) {
      second = ov;
    }
  }
  if (best < 0.9 || second > 0.1 || candidates[best_i].vectors.size() != reference.vectors.size()) {
    std::ostringstream msg;
    msg << "mass_orthogonality_check: level " << level << " cannot be tracked to m = " << m_shifted
        << " (best overlap " << best << ", runner-up " << std::max(second, 0.0) << ")";
    throw TrackingError(msg.str());
  }
  return candidates[best_i].energy;
}

}  // namespace

StaticPotential StaticPotential::free() {
  StaticPotential p;
  p.a0 = [](double) { return 0.0; };
  p.a1 = [](double) { return 0.0; };
  p.name = "free";
  return p;
}

StaticPotential StaticPotential::square_well(double depth, double half_width) {
  if (!(half_width > 0.0)) throw DomainError("square_well: half width must be positive");
  StaticPotential p;
  p.a0 = [=](double x) { return std::abs(x) < half_width ? -depth : 0.0; };
  p.a1 = [](double) { return 0.0; };
  p.name = "square_well";
  p.parameters = {{"depth", depth}, {"half_width", half_width}};
  return p;
}

StaticPotential StaticPotential::constant(double a0, double a1, double coupling) {
  StaticPotential p;
  p.a0 = [=](double) { return a0; };
  p.a1 = [=](double) { return a1; };
  p.coupling = coupling;
  p.name = "constant";
  p.parameters = {{"a0", a0}, {"a1", a1}};
  return p;
}

std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "hard_wall"; }

double Lattice::spacing() const {
  return boundary == Boundary::periodic ? 2.0 * half_length / sites : 2.0 * half_length / (sites + 1);
}

double Lattice::x(int site) const {
  return boundary == Boundary::periodic ? -half_length + site * spacing() : -half_length + (site + 1) * spacing();
}

int Lattice::position(int site) const {
  if (boundary == Boundary::hard_wall) return site;
  // Sites 0, N-1, 1, N-2, ... occupy rows 0, 1, 2, 3, ...
  return site < (sites + 1) / 2 ? 2 * site : 2 * (sites - 1 - site) + 1;
}

int Lattice::bandwidth() const { return boundary == Boundary::periodic ? 5 : 3; }

DiscreteHamiltonian build_hamiltonian(const StaticPotential& pot, double m, const Lattice& lattice) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("build_hamiltonian: mass must be non-negative");
  if (lattice.sites < 4) throw DomainError("build_hamiltonian: need at least 4 sites");
  if (!(lattice.half_length > 0.0)) throw DomainError("build_hamiltonian: half length must be positive");
  if (!pot.a0 || !pot.a1) throw DomainError("build_hamiltonian: potential callables missing");
  const int n = lattice.sites;
  const double h = lattice.spacing();
  const double r = lattice.wilson_r;

  double max_field = 0.0;
  std::vector<double> ea0(n), ea1(n);
  for (int j = 0; j < n; ++j) {
    ea0[j] = pot.coupling * pot.a0(lattice.x(j));
    ea1[j] = pot.coupling * pot.a1(lattice.x(j));
    max_field = std::max({max_field, std::abs(ea0[j]), std::abs(ea1[j])});
  }
  if (m * h > kMaxStep || max_field * h > kMaxStep) {
    std::ostringstream msg;
    msg << "build_hamiltonian: lattice too coarse (m h = " << m * h << ", max|eA| h = " << max_field * h
        << ", limit " << kMaxStep << ")";
    throw ResolutionError(msg.str());
  }

  DiscreteHamiltonian out{numerics::BandedHermitian(2 * n, lattice.bandwidth()), lattice, m, {}};
  out.site_of_position.resize(n);
  for (int j = 0; j < n; ++j) out.site_of_position[lattice.position(j)] = j;
  auto& mat = out.matrix;
  auto row = [&](int site, int s) { return 2 * lattice.position(site) + s; };

  for (int j = 0; j < n; ++j) {
    // sigma_3 (m + r/h) + e A_0 + e A_1 sigma_1
    mat.add(row(j, 0), row(j, 0), m + r / h + ea0[j]);
    mat.add(row(j, 1), row(j, 1), -(m + r / h) + ea0[j]);
    mat.add(row(j, 0), row(j, 1), ea1[j]);
    mat.add(row(j, 1), row(j, 0), ea1[j]);
  }
  // Hopping j -> j+1: -i sigma_1 / (2h) - (r / 2h) sigma_3, and its adjoint.
  const cplx hop_off(0.0, -1.0 / (2.0 * h));
  const double hop_diag = -r / (2.0 * h);
  const int bonds = lattice.boundary == Boundary::periodic ? n : n - 1;
  for (int j = 0; j < bonds; ++j) {
    const int k = (j + 1) % n;
    mat.add(row(j, 0), row(k, 0), hop_diag);
    mat.add(row(j, 1), row(k, 1), -hop_diag);
    mat.add(row(j, 0), row(k, 1), hop_off);
    mat.add(row(j, 1), row(k, 0), hop_off);
    mat.add(row(k, 0), row(j, 0), hop_diag);
    mat.add(row(k, 1), row(j, 1), -hop_diag);
    mat.add(row(k, 1), row(j, 0), std::conj(hop_off));
    mat.add(row(k, 0), row(j, 1), std::conj(hop_off));
  }
  const double defect = mat.hermiticity_defect();
  if (defect > 1e-12 * std::max(1.0, mat.max_abs())) {
    throw InternalError("build_hamiltonian: assembled matrix is not Hermitian");
  }
  return out;
}

std::vector<EigenPair> eigensolve(const DiscreteHamiltonian& h, EigenWindow window, int count) {
  return numerics::eigensolve_banded(h.matrix, window, count);
}

cplx beta_overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size() || a.size() % 2 != 0) throw DomainError("beta_overlap: size mismatch");
  cplx sum{};
  for (Eigen::Index i = 0; i < a.size(); i += 2) {
    sum += std::conj(a[i]) * b[i] - std::conj(a[i + 1]) * b[i + 1];
  }
  return sum;
}

std::vector<Level> positive_levels(const DiscreteHamiltonian& h, int count) {
  if (count < 1) throw DomainError("positive_levels: count must be >= 1");
  const double top = window_for(h, count, nullptr);
  const auto pairs = eigensolve(h, {0.0, top});
  std::vector<double> values;
  for (const auto& p : pairs) values.push_back(p.value);
  std::vector<Level> out;
  for (const auto& idx : cluster_indices(values)) {
    Level l;
    for (int i : idx) {
      l.energy += pairs[i].value;
      l.vectors.push_back(pairs[i].vector);
    }
    l.energy /= idx.size();
    out.push_back(std::move(l));
  }
  out.resize(count);
  return out;
}

std::vector<MassOrthogonalityRow> mass_orthogonality_check(const StaticPotential& pot, double m,
                                                           const Lattice& lattice, int first_level, int count,
                                                           const MassOrthogonalityOptions& opts) {
  if (!(m > 0.0)) throw DomainError("mass_orthogonality_check: mass must be positive");
  if (first_level < 0 || count < 1) throw DomainError("mass_orthogonality_check: bad level range");
  const int needed = first_level + count;
  const double dm = opts.relative_step * m;
  const auto base = positive_levels(build_hamiltonian(pot, m, lattice), needed);
  // Shifted solves keep two spare levels so that the tracking sees neighbours.
  auto shifted = [&](double mass) { return positive_levels(build_hamiltonian(pot, mass, lattice), needed + 2); };
  const auto plus = shifted(m + dm), minus = shifted(m - dm);
  const auto plus_half = shifted(m + 0.5 * dm), minus_half = shifted(m - 0.5 * dm);

  std::vector<MassOrthogonalityRow> rows;
  for (int k = first_level; k < needed; ++k) {
    const Level& l = base[k];
    const double ep = tracked_energy(l, plus, m + dm, k);
    const double em = tracked_energy(l, minus, m - dm, k);
    const double eph = tracked_energy(l, plus_half, m + 0.5 * dm, k);
    const double emh = tracked_energy(l, minus_half, m - 0.5 * dm, k);
    const double d_full = (ep - em) / (2.0 * dm);
    const double d_half = (eph - emh) / dm;
    MassOrthogonalityRow row;
    row.level = k;
    row.degeneracy = static_cast<int>(l.vectors.size());
    row.energy = l.energy;
    row.beta_expectation = level_beta(l);
    row.dE_dm = (4.0 * d_half - d_full) / 3.0;
    row.discrepancy = std::abs(row.beta_expectation - row.dE_dm);
    rows.push_back(row);
  }
  return rows;
}

double cross_mass_overlap(const StaticPotential& pot, const Lattice& lattice, int k, double m, int k_prime,
                          double m_prime) {
  const auto a = positive_levels(build_hamiltonian(pot, m, lattice), k + 1)[k];
  const auto b = positive_levels(build_hamiltonian(pot, m_prime, lattice), k_prime + 1)[k_prime];
  Eigen::MatrixXcd c(b.vectors.size(), a.vectors.size());
  for (std::size_t i = 0; i < b.vectors.size(); ++i)
    for (std::size_t j = 0; j < a.vectors.size(); ++j) c(i, j) = beta_overlap(b.vectors[i], a.vectors[j]);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(c).singularValues()[0];
}

std::optional<DegeneratePair> degenerate_cross_mass_check(const StaticPotential& pot, const Lattice& lattice,
                                                          int k, double m, int k_prime,
                                                          const DegenerateSearch& search) {
  if (!(m > 0.0)) throw DomainError("degenerate_cross_mass_check: mass must be positive");
  if (k < 0 || k_prime < 0) throw DomainError("degenerate_cross_mass_check: level indices must be >= 0");
  const double target = level_energy(build_hamiltonian(pot, m, lattice), k);
  DegeneratePair out;
  out.k = k;
  out.k_prime = k_prime;
  out.m = m;
  out.energy = target;
  if (k == k_prime) {
    out.m_prime = m;
  } else {
    double lo = search.m_lower, hi = search.m_upper;
    if (!(hi > lo)) {
      // Default bracket, capped where the lattice stops resolving the mass.
      const double m_max = kMaxStep / lattice.spacing() * (1.0 - 1e-12);
      lo = k_prime < k ? m : m / 8.0;
      hi = k_prime < k ? std::min(8.0 * m, m_max) : m;
    }
    int evaluations = 0;
    auto f = [&](double mp) {
      ++evaluations;
      return level_energy(build_hamiltonian(pot, mp, lattice), k_prime) - target;
    };
    const auto root = numerics::find_root(f, lo, hi, search.tolerance);
    if (!root) return std::nullopt;
    out.m_prime = *root;
    out.root_evaluations = evaluations;
  }
  const auto a = positive_levels(build_hamiltonian(pot, m, lattice), k + 1)[k];
  const auto b = positive_levels(build_hamiltonian(pot, out.m_prime, lattice), k_prime + 1)[k_prime];
  out.energy_mismatch = std::abs(b.energy - a.energy);
  Eigen::MatrixXcd c(b.vectors.size(), a.vectors.size()), d(b.vectors.size(), a.vectors.size());
  for (std::size_t i = 0; i < b.vectors.size(); ++i) {
    for (std::size_t j = 0; j < a.vectors.size(); ++j) {
      c(i, j) = beta_overlap(b.vectors[i], a.vectors[j]);
      d(i, j) = b.vectors[i].dot(a.vectors[j]);
    }
  }
  out.overlap = Eigen::JacobiSVD<Eigen::MatrixXcd>(c).singularValues()[0];
  out.norm_overlap = Eigen::JacobiSVD<Eigen::MatrixXcd>(d).singularValues()[0];
  return out;
}

}  // namespace histdirac::field
