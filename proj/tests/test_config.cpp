#include <catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include "armorsim/config.hpp"
#include "armorsim/report.hpp"
#include "armorsim/scenarios.hpp"

using namespace armorsim;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = ARMORSIM_SOURCE_DIR;

ConfigError error_of(const std::string& text) {
  try {
    config::parse_scenario(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("document was accepted: " << text);
  return ConfigError("", "");
}

// Physical content only: names and output cadence may differ between the
// built-in and the file.
report::ojson physics(const Scenario& s) {
  auto j = report::scenario_json(s);
  j.erase("name");
  j["solver"]["fabric"].erase("snapshot_interval_s");
  return j;
}

const char* kMinimal = R"({
  "version": 1,
  "projectile": "M16",
  "facing": { "kind": "thin", "h_m": 0.004, "BH": 500 },
  "impact": { "V0_mps": 1000 }
})";

}  // namespace

TEST_CASE("minimal document uses the defaults") {
  const auto s = config::parse_scenario(kMinimal);
  CHECK(s.name == "scenario");
  CHECK(s.projectile.name == "M16");
  CHECK(std::get<ThinFacingStage>(s.facing).spec.brinell == 500);
  CHECK(std::get<ThinFacingStage>(s.facing).mass_retention == 1.0);
  CHECK_FALSE(s.backing);
  CHECK_FALSE(s.handoff.any());
  CHECK(s.workers == 0);
  CHECK(s.output.write_trace);
}

TEST_CASE("errors carry the key path and line") {
  SECTION("wrong type") {
    const auto e = error_of(R"({
  "version": 1,
  "projectile": "M16",
  "facing": { "kind": "thin",
              "h_m": "thick", "BH": 500 },
  "impact": { "V0_mps": 1000 }
})");
    CHECK(e.path() == "facing.h_m");
    CHECK(e.line() == 5);
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("expected a number"));
  }
  SECTION("unknown key") {
    const auto e = error_of(R"({
  "version": 1,
  "projectile": "AK47",
  "facing": { "kind": "thin", "h_m": 0.004, "BH": 500 },
  "backing": { "catalog": "kevlar29",
    "plys": 40 },
  "impact": { "V0_mps": 740 }
})");
    CHECK(e.path() == "backing.plys");
    CHECK(e.line() == 6);
  }
  SECTION("missing version") {
    CHECK(error_of(R"({"projectile": "M16", "facing": {"kind": "thin", "h_m": 0.004, "BH": 500},
                       "impact": {"V0_mps": 1000}})")
              .path() == "version");
  }
  SECTION("unsupported version") {
    std::string text = kMinimal;
    text.replace(text.find("\"version\": 1"), 12, "\"version\": 2");
    const auto e = error_of(text);
    CHECK(e.path() == "version");
    CHECK(e.line() == 2);
  }
  SECTION("malformed JSON") {
    const auto e = error_of("{\n  \"version\": 1,\n  \"projectile\": \"M16\",,\n}");
    CHECK(e.line() == 3);
  }
  SECTION("unknown catalog names") {
    CHECK(error_of(R"({"version": 1, "projectile": {"catalog": "M4"},
        "facing": {"kind": "thin", "h_m": 0.004, "BH": 500}, "impact": {"V0_mps": 1000}})")
              .path() == "projectile.catalog");
    CHECK(error_of(R"({"version": 1, "projectile": "p1",
        "facing": {"kind": "thick", "catalog": "t9"}, "impact": {"V0_mps": 1000}})")
              .path() == "facing.catalog");
  }
  SECTION("ranges") {
    CHECK(error_of(R"({"version": 1, "projectile": "M16", "facing": {"kind": "thin", "h_m": 0.004, "BH": 500},
        "backing": {"catalog": "kevlar29", "plies": 201}, "impact": {"V0_mps": 1000}})")
              .path() == "backing.plies");
    CHECK(error_of(R"({"version": 1, "projectile": "M16", "facing": {"kind": "thin", "h_m": 0.004, "BH": 500},
        "impact": {"V0_mps": -3}})")
              .path() == "impact.V0_mps");
    CHECK(error_of(R"({"version": 1, "projectile": "M16", "facing": {"kind": "thin", "h_m": 0.004, "BH": 500},
        "impact": {"V0_mps": 1000}, "solver": {"fabric": {"radial_cells": 10}}})")
              .path() == "solver.fabric.radial_cells");
  }
  SECTION("misplaced facing keys") {
    CHECK(error_of(R"({"version": 1, "projectile": "M16",
        "facing": {"kind": "thin", "h_m": 0.004, "BH": 500, "catalog": "t1"}, "impact": {"V0_mps": 1000}})")
              .path() == "facing.catalog");
  }
}

TEST_CASE("missing files are config errors") {
  CHECK_THROWS_AS(config::load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("bundled scenario files match the built-in scenarios") {
  const std::vector<std::pair<std::string, Scenario>> cases{
      {"pinned_handoff.json", scenarios::pinned_handoff()},
      {"ply_modulus_70GPa.json", scenarios::ply_modulus(70e9)},
      {"ply_modulus_140GPa.json", scenarios::ply_modulus(140e9)},
      {"stopping_power_m16.json", scenarios::stopping_power("M16")},
      {"stopping_power_ak47.json", scenarios::stopping_power("AK47")},
      {"graded_facing_ceramic.json", scenarios::graded_facing("ceramic_ref")},
      {"graded_facing_fgm.json", scenarios::graded_facing("fgm_ref")},
  };
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(kRoot / "scenarios")) files += e.path().extension() == ".json";
  CHECK(files == cases.size() + 1);
  for (const auto& [file, builtin] : cases) {
    INFO(file);
    const auto s = config::load_scenario((kRoot / "scenarios" / file).string());
    CHECK(physics(s) == physics(builtin));
  }
  Scenario rod = scenarios::rod();
  rod.jet.dt = 1e-8;
  CHECK(physics(config::load_scenario((kRoot / "scenarios" / "rod_p1_t3.json").string())) == physics(rod));
}

TEST_CASE("inline projectile, facing and backing") {
  const auto s = config::parse_scenario(R"({
    "version": 1,
    "name": "custom",
    "projectile": { "mass_kg": 0.05, "diameter_m": 0.01, "length_m": 0.08, "density_kgm3": 7850,
                    "yield_Pa": 1e9, "strength_Pa": 2e9 },
    "facing": { "kind": "thick", "density_kgm3": 3900,
                "profile": { "kind": "linear_ramp", "yield0_Pa": 3e9, "strength0_Pa": 4e9,
                             "yield1_Pa": 1e9, "strength1_Pa": 1.5e9, "ramp_depth_m": 0.01 },
                "thickness_m": 0.02 },
    "backing": { "plies": 12, "areal_density_kgm2": 0.2, "curve": [[0, 0], [0.02, 1.4e9]],
                 "tensile_limit_Pa": 2.8e9, "shear_modulus_Pa": 1e8, "shear_limit_Pa": 2e7,
                 "normal_modulus_Pa": 1e9, "normal_limit_Pa": 3e7 },
    "impact": { "V0_mps": 800, "handoff": { "Vr_mps": 0 } },
    "solver": { "workers": 2, "jet": { "projectile_lambda": "printed", "record_every": 5 },
                "fabric": { "cfl_safety": 0.5, "history_interval_s": 1e-7 } },
    "output": { "trace": false }
  })");
  CHECK(s.name == "custom");
  CHECK(s.projectile.radius_m == 0.005);
  CHECK(s.projectile.strength_Pa == 2e9);
  const auto& f = std::get<ThickFacingStage>(s.facing).spec;
  CHECK(f.thickness_m == 0.02);
  CHECK(f.density_kgm3 == 3900);
  REQUIRE(s.backing);
  CHECK(s.backing->ply_count == 12);
  CHECK(s.backing->ply_curve.stress(0.01) == Catch::Approx(0.7e9));
  CHECK(s.handoff.velocity_mps == 0.0);
  CHECK_FALSE(s.handoff.mass_kg);
  CHECK(s.workers == 2);
  CHECK(s.jet.iteration.projectile_lambda == jet::ProjectileLambda::printed);
  CHECK(s.jet.record_every == 5);
  CHECK(s.fabric.cfl_safety == 0.5);
  CHECK_FALSE(s.output.write_trace);
  CHECK(s.output.write_snapshots);
}

TEST_CASE("semi-infinite flag and thickness conflict") {
  const auto e = error_of(R"({"version": 1, "projectile": "p1",
      "facing": {"kind": "thick", "catalog": "t3", "thickness_m": 0.1, "semi_infinite": true},
      "impact": {"V0_mps": 1500}})");
  CHECK(e.path() == "facing.semi_infinite");
}
