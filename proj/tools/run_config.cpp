#include "run_config.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace histdirac::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("config: " + key + " = '" + text + "' is not a number");
  }
  return v;
}

const std::map<std::string, std::string>& defaults() {
  // Density grids: x = 0.12 n, t = 2 + 0.12 j. The offsets keep every node
  // off the light cone and include (0, 2).
  static const std::map<std::string, std::string> d{
      {"seed", "20240611"},
      {"density.m", "1"},
      {"density.x.start", "-4.92"},
      {"density.x.step", "0.12"},
      {"density.x.count", "83"},
      {"density.t.start", "-4.96"},
      {"density.t.step", "0.12"},
      {"density.t.count", "84"},
      {"density.eps", "1e-3"},
      {"density.quad.x.start", "-4.75"},
      {"density.quad.x.step", "0.5"},
      {"density.quad.x.count", "20"},
      {"density.quad.t.start", "-5"},
      {"density.quad.t.step", "0.5"},
      {"density.quad.t.count", "21"},
      {"purity.m", "1"},
      {"purity.eps_m", "0.1, 1, 10"},
      {"purity.v", "0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9"},
      {"purity.numeric", "true"},
      {"purity.rel_tol", "1e-11"},
      {"purity.spectrum_v", "0, 0.5, 0.9"},
      {"purity.spectrum_points", "400"},
      {"tau.mean", "1"},
      {"tau.sigma", "0.1"},
      {"tau.values", "0, 2, 4"},
      {"tau.x.start", "-4.92"},
      {"tau.x.step", "0.12"},
      {"tau.x.count", "83"},
      {"tau.t.start", "-4.96"},
      {"tau.t.step", "0.12"},
      {"tau.t.count", "84"},
      {"verify.samples", "100"},
      {"verify.positivity_samples", "10000"},
      {"verify.inject_fault", ""},
  };
  return d;
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      set(line);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  if (!values_.count(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = trim(assignment.substr(eq + 1));
}

std::string RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

double RunConfig::number(const std::string& key) const { return parse_double(key, get(key)); }

int RunConfig::integer(const std::string& key) const {
  const double v = number(key);
  if (v != static_cast<int>(v)) throw ConfigError("config: " + key + " must be an integer");
  return static_cast<int>(v);
}

bool RunConfig::flag(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: " + key + " must be true or false");
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

void RunConfig::validate(const std::string& command) const {
  auto positive = [&](const std::string& key) {
    if (!(number(key) > 0.0)) throw ConfigError("config: " + key + " must be positive");
  };
  auto axis = [&](const std::string& prefix) {
    positive(prefix + ".step");
    if (integer(prefix + ".count") < 1) throw ConfigError("config: " + prefix + ".count must be >= 1");
  };
  if (command == "density") {
    positive("density.m");
    positive("density.eps");
    for (const char* a : {"density.x", "density.t", "density.quad.x", "density.quad.t"}) axis(a);
  } else if (command == "purity") {
    positive("purity.m");
    positive("purity.rel_tol");
    for (double em : numbers("purity.eps_m"))
      if (!(em > 0.0)) throw ConfigError("config: purity.eps_m entries must be positive");
    for (const char* key : {"purity.v", "purity.spectrum_v"})
      for (double v : numbers(key))
        if (!(v >= 0.0 && v < 1.0)) throw ConfigError(std::string("config: ") + key + " entries must lie in [0, 1)");
    if (integer("purity.spectrum_points") < 1) throw ConfigError("config: purity.spectrum_points must be >= 1");
  } else if (command == "tau") {
    positive("tau.mean");
    positive("tau.sigma");
    if (numbers("tau.values").empty()) throw ConfigError("config: tau.values is empty");
    axis("tau.x");
    axis("tau.t");
  } else if (command == "verify") {
    if (integer("verify.samples") < 1) throw ConfigError("config: verify.samples must be >= 1");
    if (integer("verify.positivity_samples") < 1) {
      throw ConfigError("config: verify.positivity_samples must be >= 1");
    }
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

std::string RunConfig::resolved() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace histdirac::cli
