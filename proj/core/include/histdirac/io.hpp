#pragma once

// CSV and JSON writers. Doubles are written with %.17g so that a file read
// back reproduces the in-memory values bit for bit; JSON objects have sorted
// keys. All writers throw IoError when the target cannot be written.

#include <filesystem>
#include <string>
#include <vector>

#include "histdirac/clock_spectrum.hpp"
#include "histdirac/external_field.hpp"
#include "histdirac/history_state.hpp"
#include "histdirac/lightcone_density.hpp"

namespace histdirac::io {

namespace fs = std::filesystem;

std::string format_double(double v);

/// Creates parent directories as needed.
void write_text(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// Columns x, y, z, t, re_psi0, im_psi0, ..., re_psi3, im_psi3.
std::string wavefunction_csv(const history::WavefunctionGrid& w);
/// Grid spec, time, mass and both norms.
std::string wavefunction_json(const history::WavefunctionGrid& w);

/// Columns x, t, rho (plus rho_im for cross-mass grids).
std::string density_csv(const lightcone::DensityGrid& g);
/// kind, method, m, m', eps, tau and the grid axes.
std::string density_json(const lightcone::DensityGrid& g);

/// (p, lambda2) at n uniform points in (0, p_max].
std::string spectrum_csv(const clock::ClockSpectrum& s, int n, double p_max);

struct RatioRow {
  double v = 0.0;
  double r_closed = 0.0;
  double r_numeric = 0.0;
};
std::string ratio_csv(const std::vector<RatioRow>& rows);

struct FieldReport {
  field::StaticPotential potential;
  field::Lattice lattice;
  double mass = 1.0;
  std::vector<field::MassOrthogonalityRow> levels;
  std::vector<field::DegeneratePair> degenerate_pairs;
};
std::string field_report_json(const FieldReport& r);

}  // namespace histdirac::io
