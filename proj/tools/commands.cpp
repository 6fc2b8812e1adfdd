#include "commands.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "histdirac/clock_spectrum.hpp"
#include "histdirac/io.hpp"
#include "histdirac/lightcone_density.hpp"
#include "histdirac/verification.hpp"
#include "histdirac/version.hpp"

namespace histdirac::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

lightcone::GridAxis axis(const RunConfig& cfg, const std::string& prefix) {
  return {cfg.number(prefix + ".start"), cfg.number(prefix + ".step"), cfg.integer(prefix + ".count")};
}

class Output {
 public:
  Output(fs::path dir, std::string command, const RunConfig& cfg)
      : dir_(std::move(dir)), command_(std::move(command)), cfg_(cfg) {}

  void write(const std::string& name, const std::string& content) {
    io::write_text(dir_ / name, content);
    files_.push_back(name);
  }

  CommandResult finish(json extra, int exit_code, std::string summary) {
    write("config.txt", cfg_.resolved());
    json m;
    m["command"] = command_;
    m["version"] = kVersion;
    m["parameters"] = cfg_.values();
    m["files"] = files_;
    m["exit_code"] = exit_code;
    for (auto& [k, v] : extra.items()) m[k] = v;
    io::write_text(dir_ / "manifest.json", m.dump(2) + "\n");
    files_.push_back("manifest.json");
    return {exit_code, files_, std::move(summary)};
  }

 private:
  fs::path dir_;
  std::string command_;
  const RunConfig& cfg_;
  std::vector<std::string> files_;
};

}  // namespace

CommandResult cmd_density(const RunConfig& cfg, const fs::path& out) {
  cfg.validate("density");
  Output o(out, "density", cfg);
  const double m = cfg.number("density.m");

  lightcone::DensityParams p;
  p.m = m;
  p.m_prime = m;
  p.kind = lightcone::DensityKind::invariant;
  const auto inv = lightcone::make_density_grid(p, axis(cfg, "density.x"), axis(cfg, "density.t"));
  o.write("density_invariant.csv", io::density_csv(inv));
  o.write("density_invariant.json", io::density_json(inv));

  p.kind = lightcone::DensityKind::dirac;
  const auto dir = lightcone::make_density_grid(p, axis(cfg, "density.x"), axis(cfg, "density.t"));
  o.write("density_dirac.csv", io::density_csv(dir));
  o.write("density_dirac.json", io::density_json(dir));

  p.kind = lightcone::DensityKind::invariant;
  p.method = lightcone::DensityMethod::quadrature;
  p.eps = cfg.number("density.eps");
  const auto quad = lightcone::make_density_grid(p, axis(cfg, "density.quad.x"), axis(cfg, "density.quad.t"));
  o.write("density_regularized.csv", io::density_csv(quad));
  o.write("density_regularized.json", io::density_json(quad));

  json extra;
  extra["tolerances"] = {{"psi_quadrature_rel_tol", lightcone::PsiQuadratureOptions{}.rel_tol}};
  return o.finish(extra, 0, "wrote invariant, Dirac and eps = " + tag(p.eps) + " density grids");
}

CommandResult cmd_purity(const RunConfig& cfg, const fs::path& out) {
  cfg.validate("purity");
  Output o(out, "purity", cfg);
  const double m = cfg.number("purity.m");
  const bool numeric = cfg.flag("purity.numeric");
  const double rel_tol = cfg.number("purity.rel_tol");
  const int points = cfg.integer("purity.spectrum_points");
  json extra;
  extra["tolerances"] = {{"rel_tol", rel_tol}};
  for (double em : cfg.numbers("purity.eps_m")) {
    const double eps = em / m;
    std::vector<io::RatioRow> rows;
    for (double v : cfg.numbers("purity.v")) {
      io::RatioRow r;
      r.v = v;
      r.r_closed = clock::purity_ratio(eps, m, v);
      r.r_numeric = numeric ? clock::purity_ratio_numeric(eps, m, v, rel_tol) : r.r_closed;
      rows.push_back(r);
    }
    o.write("purity_ratio_em" + tag(em) + ".csv", io::ratio_csv(rows));
    for (double v : cfg.numbers("purity.spectrum_v")) {
      const auto s = clock::proper_spectrum(eps, m, v);
      o.write("spectrum_em" + tag(em) + "_v" + tag(v) + ".csv", io::spectrum_csv(s, points, s.p_max(1e-10)));
    }
    extra["trace"][tag(em)] = clock::proper_trace_closed(eps, m);
  }
  extra["numeric_column"] = numeric ? "angular quadrature" : "copy of closed form";
  return o.finish(extra, 0, "wrote purity ratio tables for " + std::to_string(cfg.numbers("purity.eps_m").size()) +
                                " values of eps m");
}

CommandResult cmd_tau(const RunConfig& cfg, const fs::path& out) {
  cfg.validate("tau");
  Output o(out, "tau", cfg);
  const auto masses = history::MassDistribution::gaussian(cfg.number("tau.mean"), cfg.number("tau.sigma"));
  lightcone::DensityParams p;
  p.kind = lightcone::DensityKind::tau;
  p.masses = &masses;
  const auto taus = cfg.numbers("tau.values");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    p.tau = taus[i];
    const auto g = lightcone::make_density_grid(p, axis(cfg, "tau.x"), axis(cfg, "tau.t"));
    o.write("tau_" + std::to_string(i) + ".csv", io::density_csv(g));
    o.write("tau_" + std::to_string(i) + ".json", io::density_json(g));
  }
  json extra;
  extra["mass_distribution"] = {{"kind", "gaussian"}, {"mean", cfg.number("tau.mean")}, {"sigma", cfg.number("tau.sigma")}};
  return o.finish(extra, 0, "wrote " + std::to_string(taus.size()) + " tau-density grids");
}

CommandResult cmd_verify(const RunConfig& cfg, const fs::path& out) {
  cfg.validate("verify");
  Output o(out, "verify", cfg);
  verify::Options opts;
  opts.seed = static_cast<std::uint64_t>(cfg.number("seed"));
  opts.samples = cfg.integer("verify.samples");
  opts.positivity_samples = cfg.integer("verify.positivity_samples");
  opts.inject_fault = cfg.get("verify.inject_fault");
  const auto report = verify::run(opts);
  o.write("verify_report.json", report.to_json());

  std::ostringstream summary;
  for (const auto& c : report.checks) {
    summary << (c.passed ? "PASS " : "FAIL ") << c.module << "." << c.name << "  value=" << c.value
            << " threshold=" << (c.below ? "<" : ">") << c.threshold << "\n";
  }
  const auto failed = report.failures();
  summary << report.checks.size() << " checks, " << failed.size() << " failed";
  for (const auto& f : failed) summary << "\nfailing invariant: " << f;
  const int code = report.all_passed() ? 0 : 1;
  json extra;
  extra["checks"] = report.checks.size();
  extra["failed"] = failed;
  return o.finish(extra, code, summary.str());
}

CommandResult dispatch(const std::string& command, const RunConfig& cfg, const fs::path& out) {
  if (command == "density") return cmd_density(cfg, out);
  if (command == "purity") return cmd_purity(cfg, out);
  if (command == "tau") return cmd_tau(cfg, out);
  if (command == "verify") return cmd_verify(cfg, out);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace histdirac::cli
