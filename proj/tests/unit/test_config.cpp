#include <doctest.h>

#include <string>

#include "cqed/config.hpp"

using namespace cqed;

namespace {

ConfigError parse_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected ConfigError for: " << text);
  return ConfigError(0, "", "");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config materializes the standard setup") {
  const auto c = parse_config("experiment=simulate\ndelta=0.4");
  CHECK(c.experiment == ExperimentKind::simulate);
  CHECK(c.preset.model.kappa == 0.001);
  CHECK(c.preset.model.delta == 0.4);
  CHECK(c.preset.model.truncation == 100);
  CHECK(c.preset.p0 == 25.0);
  CHECK(c.preset.nbar == 10.0);
  CHECK(c.preset.prep.z0 == 1.0);
  CHECK(c.preset.x0 == 0.0);
  CHECK(c.integrator.dt == 0.005);
}

TEST_CASE("sections, comments and whitespace") {
  const auto c = parse_config(
      "# fig 1 style\n"
      "[run]\n"
      "experiment = sweep   # trailing comment\n"
      "\n"
      "[model]\n"
      "  kappa = 2e-3\n"
      "[sweep]\n"
      "parameter = delta\n"
      "grid_values = -1, 0, 1\n");
  CHECK(c.experiment == ExperimentKind::sweep);
  CHECK(c.preset.model.kappa == 0.002);
  CHECK(c.grid.points() == std::vector<double>{-1, 0, 1});
}

TEST_CASE("range errors name the key and bound") {
  const auto e = parse_error("experiment=simulate\nkappa=-1");
  CHECK(e.line() == 2);
  CHECK(e.key() == "kappa");
  CHECK(std::string(e.what()).find("kappa") != std::string::npos);
  CHECK(std::string(e.what()).find("> 0") != std::string::npos);

  CHECK(parse_error("z0 = 1.2").key() == "z0");
  CHECK(parse_error("truncation = 0").key() == "truncation");
  CHECK(parse_error("dt = abc").key() == "dt");
  CHECK(parse_error("mode = leapfrog").key() == "mode");
}

TEST_CASE("strict keys") {
  const auto unknown = parse_error("experiment=simulate\n\nkapa=0.1");
  CHECK(unknown.line() == 3);
  CHECK(std::string(unknown.what()).find("kapa") != std::string::npos);

  CHECK(parse_error("delta=0.1\ndelta=0.2").line() == 2);
  CHECK(parse_error("[model]\np0 = 3").line() == 2);
  CHECK(parse_error("[physics]\n").line() == 1);
  CHECK(parse_error("delta 0.4").line() == 1);
}

TEST_CASE("cross-key validation") {
  CHECK_THROWS_AS(parse_config("experiment=lyapunov\ntransient=100\ntotal_time=50"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment=sweep\ngrid_min=1\ngrid_max=0\ngrid_count=5"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment=fidelity\nfit_begin=300\nfit_end=200"), ConfigError);
}

TEST_CASE("per-experiment grid defaults") {
  const auto fig1 = parse_config("experiment=sweep");
  CHECK(fig1.grid == Grid{-2.0, 2.0, 81, {}});
  const auto scatter = parse_config("experiment=scatter");
  CHECK(scatter.grid.min == 0.0);
  CHECK(scatter.grid.max == 45.0);
  const auto inv = parse_config("experiment=inversion-map");
  CHECK(inv.grid == Grid{-1.0, 1.0, 201, {}});
  // partially given bounds keep the default for the rest
  CHECK(parse_config("experiment=sweep\ngrid_count=21").grid == Grid{-2.0, 2.0, 21, {}});
  CHECK(parse_config("experiment=inversion-map\ngrid_min=0").grid == Grid{0.0, 1.0, 201, {}});
}

TEST_CASE("emit and parse round-trip") {
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    CHECK(parse_config(emit_config(p.config)) == p.config);
  }
  RunConfig odd = parse_config("experiment=fidelity\ndelta=-0.1234567890123\nz0_list=0.1,-0.3\ndir=/tmp/x\nworkers=3");
  odd.preset.model.kappa = 1.0 / 3.0;
  CHECK(parse_config(emit_config(odd)) == odd);
}

TEST_CASE("canonical spec ignores where and how the run executes") {
  auto a = preset_config("fig1");
  auto b = a;
  b.output_dir = "/elsewhere";
  b.workers = 16;
  CHECK(canonical_spec(a) == canonical_spec(b));
  b.preset.model.delta = 0.5;
  CHECK(canonical_spec(a) != canonical_spec(b));
}

TEST_CASE("preset table") {
  const std::string table = presets_table();
  for (const char* name : {"fig1", "fig2a", "fig2b", "fig2c", "fig3", "zero-detuning-check"}) {
    CHECK(table.find(name) != std::string::npos);
  }
  CHECK(table.find("delta-grid [-2, 2]") != std::string::npos);
  const auto fig2a = preset_config("fig2a");
  CHECK(fig2a.preset.model.delta == 0.4);
  CHECK(fig2a.preset.model.kappa == 0.001);
  CHECK(fig2a.experiment == ExperimentKind::scatter);
  CHECK(presets_table() == table);
  CHECK_THROWS_AS(preset_config("fig9"), std::invalid_argument);
}

TEST_CASE("config overrides a preset base") {
  const auto c = parse_config("total_time = 500", preset_config("fig1"));
  CHECK(c.experiment == ExperimentKind::sweep);
  CHECK(c.lyapunov.total_time == 500.0);
  CHECK(c.grid.count == 81);
}

}  // TEST_SUITE
