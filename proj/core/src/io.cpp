#include "histdirac/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "histdirac/errors.hpp"

namespace histdirac::io {
namespace {

using nlohmann::json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json grid_axis(const lightcone::GridAxis& a) {
  return {{"start", a.start}, {"step", a.step}, {"count", a.count}};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw IoError("csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string wavefunction_csv(const history::WavefunctionGrid& w) {
  std::vector<std::string> header{"x", "y", "z", "t"};
  for (int c = 0; c < 4; ++c) {
    header.push_back("re_psi" + std::to_string(c));
    header.push_back("im_psi" + std::to_string(c));
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(w.psi.size());
  const auto& g = w.grid;
  for (int i = 0; i < g.counts[0]; ++i) {
    for (int j = 0; j < g.counts[1]; ++j) {
      for (int k = 0; k < g.counts[2]; ++k) {
        const auto x = g.point(i, j, k);
        const auto& v = w.psi[g.index(i, j, k)];
        std::vector<double> row{x[0], x[1], x[2], w.time};
        for (int c = 0; c < 4; ++c) {
          row.push_back(v[c].real());
          row.push_back(v[c].imag());
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return csv(header, rows);
}

std::string wavefunction_json(const history::WavefunctionGrid& w) {
  json j;
  j["grid"] = {{"origin", {w.grid.origin[0], w.grid.origin[1], w.grid.origin[2]}},
               {"spacing", w.grid.spacing},
               {"counts", {w.grid.counts[0], w.grid.counts[1], w.grid.counts[2]}}};
  j["time"] = w.time;
  j["mass"] = w.mass;
  j["input_norm"] = w.input_norm;
  j["discrete_norm"] = w.discrete_norm;
  return dump(j);
}

std::string density_csv(const lightcone::DensityGrid& g) {
  const bool complex = !g.im.empty();
  std::vector<std::string> header{"x", "t", "rho"};
  if (complex) header.push_back("rho_im");
  std::vector<std::vector<double>> rows;
  rows.reserve(g.re.size());
  for (int i = 0; i < g.x.count; ++i) {
    for (int j = 0; j < g.t.count; ++j) {
      const std::size_t n = std::size_t(i) * g.t.count + j;
      std::vector<double> row{g.x.at(i), g.t.at(j), g.re[n]};
      if (complex) row.push_back(g.im[n]);
      rows.push_back(std::move(row));
    }
  }
  return csv(header, rows);
}

std::string density_json(const lightcone::DensityGrid& g) {
  const auto& p = g.params;
  json j;
  j["kind"] = lightcone::to_string(p.kind);
  j["method"] = lightcone::to_string(p.method);
  j["m"] = p.m;
  j["m_prime"] = p.m_prime;
  j["eps"] = p.eps;
  j["tau"] = p.tau;
  j["x"] = grid_axis(g.x);
  j["t"] = grid_axis(g.t);
  if (p.masses) j["mass_support"] = {p.masses->lower(), p.masses->upper()};
  return dump(j);
}

std::string spectrum_csv(const clock::ClockSpectrum& s, int n, double p_max) {
  std::vector<std::vector<double>> rows;
  for (const auto& [p, l] : s.sample(n, p_max)) rows.push_back({p, l});
  return csv({"p", "lambda2"}, rows);
}

std::string ratio_csv(const std::vector<RatioRow>& rows) {
  std::vector<std::vector<double>> out;
  for (const auto& r : rows) out.push_back({r.v, r.r_closed, r.r_numeric});
  return csv({"v", "R_closed", "R_numeric"}, out);
}

std::string field_report_json(const FieldReport& r) {
  json j;
  j["potential"] = {{"name", r.potential.name},
                    {"coupling", r.potential.coupling},
                    {"parameters", r.potential.parameters}};
  j["lattice"] = {{"sites", r.lattice.sites},
                  {"half_length", r.lattice.half_length},
                  {"spacing", r.lattice.spacing()},
                  {"boundary", field::to_string(r.lattice.boundary)},
                  {"wilson_r", r.lattice.wilson_r}};
  j["mass"] = r.mass;
  j["levels"] = json::array();
  for (const auto& l : r.levels) {
    j["levels"].push_back({{"level", l.level},
                           {"degeneracy", l.degeneracy},
                           {"energy", l.energy},
                           {"beta_expectation", l.beta_expectation},
                           {"dE_dm", l.dE_dm},
                           {"discrepancy", l.discrepancy}});
  }
  j["degenerate_pairs"] = json::array();
  for (const auto& d : r.degenerate_pairs) {
    j["degenerate_pairs"].push_back({{"k", d.k},
                                     {"k_prime", d.k_prime},
                                     {"m", d.m},
                                     {"m_prime", d.m_prime},
                                     {"energy", d.energy},
                                     {"energy_mismatch", d.energy_mismatch},
                                     {"overlap", d.overlap},
                                     {"norm_overlap", d.norm_overlap},
                                     {"root_evaluations", d.root_evaluations}});
  }
  return dump(j);
}

}  // namespace histdirac::io
