#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "histdirac/errors.hpp"
#include "histdirac/io.hpp"
#include "run_config.hpp"

using namespace histdirac;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("histdirac_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("doubles round trip through text") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("csv layout") {
  const auto text = io::csv({"a", "b"}, {{1.0, 2.0}, {3.0, 0.5}});
  CHECK(text == "a,b\n1,2\n3,0.5\n");
}

TEST_CASE("write and read") {
  const auto dir = scratch("io");
  io::write_text(dir / "nested" / "f.txt", "hello\n");
  CHECK(io::read_text(dir / "nested" / "f.txt") == "hello\n");
  // A regular file cannot serve as a directory.
  CHECK_THROWS_AS(io::write_text(dir / "nested" / "f.txt" / "g.txt", "x"), IoError);
  CHECK_THROWS_AS(io::read_text(dir / "missing.txt"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("density csv") {
  lightcone::DensityParams p;
  const auto g = lightcone::make_density_grid(p, {0.0, 1.0, 2}, {2.0, 1.0, 2});
  std::istringstream in(io::density_csv(g));
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,t,rho");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("run config") {
  cli::RunConfig cfg;
  CHECK(cfg.number("density.eps") == 1e-3);
  CHECK(cfg.numbers("purity.eps_m") == std::vector<double>{0.1, 1.0, 10.0});

  cfg.merge_text("# comment\npurity.m = 2\n\ndensity.eps=0.5  # trailing\n");
  CHECK(cfg.number("purity.m") == 2.0);
  CHECK(cfg.number("density.eps") == 0.5);
  cfg.set("purity.numeric=false");
  CHECK_FALSE(cfg.flag("purity.numeric"));

  CHECK_THROWS_AS(cfg.set("purity.mass=1"), cli::ConfigError);
  CHECK_THROWS_AS(cfg.set("no_equals_sign"), cli::ConfigError);
  cli::RunConfig bad;
  bad.merge_text("density.eps = abc\n");
  CHECK_THROWS_AS(bad.number("density.eps"), cli::ConfigError);
  CHECK_THROWS_AS(bad.validate("density"), cli::ConfigError);
  try {
    cfg.merge_text("\n\nbogus = 1\n", "file.cfg");
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }

  cfg.set("purity.v=0.5, 1.0");
  CHECK_THROWS_AS(cfg.validate("purity"), cli::ConfigError);
  cfg.set("purity.v=0.5");
  CHECK_NOTHROW(cfg.validate("purity"));

  // resolved() reads back to the same values.
  cli::RunConfig again;
  again.merge_text(cfg.resolved());
  CHECK(again.values() == cfg.values());
}

TEST_CASE("purity command output is byte-stable") {
  cli::RunConfig cfg;
  cfg.set("purity.numeric=false");
  cfg.set("purity.spectrum_points=50");
  const auto a = scratch("purity_a"), b = scratch("purity_b");
  const auto ra = cli::cmd_purity(cfg, a);
  const auto rb = cli::cmd_purity(cfg, b);
  CHECK(ra.exit_code == 0);
  REQUIRE(ra.files == rb.files);
  for (const auto& f : ra.files) {
    if (f == "manifest.json") continue;
    CAPTURE(f);
    CHECK(io::read_text(a / f) == io::read_text(b / f));
  }
  CHECK(fs::exists(a / "purity_ratio_em1.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("density command") {
  cli::RunConfig cfg;
  cfg.set("density.x.count=9");
  cfg.set("density.t.count=9");
  const auto dir = scratch("density");
  const auto r = cli::cmd_density(cfg, dir);
  CHECK(r.exit_code == 0);
  for (const char* f : {"density_invariant.csv", "density_dirac.csv", "density_regularized.csv",
                        "manifest.json", "config.txt"})
    CHECK(fs::exists(dir / f));
  CHECK_THROWS_AS(cli::dispatch("nonsense", cfg, dir), cli::ConfigError);
  fs::remove_all(dir);
}
