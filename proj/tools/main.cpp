#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "histdirac/errors.hpp"
#include "histdirac/io.hpp"
#include "histdirac/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"History-state Dirac toolkit: light-cone densities, clock purity, self-checks"};
  app.set_version_flag("--version", histdirac::kVersion);
  app.require_subcommand(1);

  std::string config_file;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  for (const char* name : {"density", "purity", "tau", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_file, "flat key = value file");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", overrides, "override, key=value (repeatable)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    histdirac::cli::RunConfig cfg;
    if (!config_file.empty()) cfg.merge_text(histdirac::io::read_text(config_file), config_file);
    for (const auto& s : overrides) cfg.set(s);
    const auto result = histdirac::cli::dispatch(command, cfg, out_dir);
    std::cout << result.summary << "\n";
    for (const auto& f : result.files) std::cout << "  " << out_dir << "/" << f << "\n";
    return result.exit_code;
  } catch (const histdirac::cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const histdirac::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
