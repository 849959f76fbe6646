#include <catch_amalgamated.hpp>

#include "armorsim/materials.hpp"

using namespace armorsim;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

TEST_CASE("catalog rods are steel or tungsten cylinders of the listed slenderness") {
  const auto p1 = catalog_projectile("p1");
  CHECK(p1.radius_m == 2.7e-3);
  CHECK_THAT(p1.length_m / p1.diameter_m, WithinRel(10.0, 1e-12));
  CHECK_NOTHROW(p1.check_cylinder(1e-12));
  const auto p2 = catalog_projectile("p2");
  CHECK(p2.density_kgm3 == 17000.0);
  CHECK_THAT(p2.length_m, WithinRel(62.4e-3, 1e-12));
}

TEST_CASE("bullets satisfy the cylinder idealization") {
  for (const char* name : {"M16", "AK47"}) {
    const auto p = catalog_projectile(name);
    CHECK_NOTHROW(p.validate());
    CHECK_NOTHROW(p.check_cylinder(1e-12));
    CHECK(p.perforation_factor.has_value());
  }
  CHECK(catalog_projectile("M16").mass_kg == 3.6e-3);
  CHECK(catalog_projectile("AK47").mass_kg == 9.7e-3);
}

TEST_CASE("catalog lookup errors name the available entries") {
  CHECK_THROWS_AS(catalog_lookup("p9"), UnknownName);
  CHECK_THROWS_WITH(catalog_lookup("p9"), ContainsSubstring("fgm_ref") && ContainsSubstring("p1"));
  CHECK_THROWS_AS(catalog_projectile("t1"), UnknownName);
  CHECK_THROWS_AS(catalog_facing("p1"), UnknownName);
  CHECK_THROWS_AS(catalog_fabric("kevlar49"), UnknownName);
}

TEST_CASE("targets are semi-infinite unless a thickness is given") {
  CHECK(catalog_facing("t1").semi_infinite());
  CHECK_FALSE(catalog_facing("ceramic_ref").semi_infinite());
  CHECK(catalog_facing("fgm_ref").thickness_m == 10e-3);
}

TEST_CASE("linear ramp interpolates between surface and terminal strength") {
  const auto prof = catalog_facing("fgm_ref").profile;
  const auto at0 = eval_profile(prof, 0.0);
  const auto mid = eval_profile(prof, 5e-3);
  const auto end = eval_profile(prof, 10e-3);
  const auto past = eval_profile(prof, 50e-3);
  CHECK(at0.yield_Pa == 500e6);
  CHECK(at0.strength_Pa == 1.5e9);
  CHECK_THAT(mid.yield_Pa, WithinRel(375e6, 1e-12));
  CHECK_THAT(mid.strength_Pa, WithinRel(1.125e9, 1e-12));
  CHECK(end.yield_Pa == 250e6);
  CHECK(past.strength_Pa == 0.75e9);
  CHECK(eval_profile(prof, -1.0).yield_Pa == 500e6);
}

TEST_CASE("stress-strain curve evaluation") {
  const StressStrainCurve c({{0.01, 1e9}, {0.02, 1.5e9}});
  CHECK(c.stress(0.0) == 0.0);
  CHECK(c.stress(-0.5) == 0.0);
  CHECK_THAT(c.stress(0.005), WithinRel(0.5e9, 1e-12));
  CHECK_THAT(c.stress(0.015), WithinRel(1.25e9, 1e-12));
  CHECK_THAT(c.stress(0.03), WithinRel(2.0e9, 1e-12));  // last slope continues
  CHECK_THAT(c.strain_at(1.25e9), WithinRel(0.015, 1e-12));
  CHECK_THAT(c.energy_density(0.02), WithinRel(0.5 * 0.01 * 1e9 + 0.01 * 1.25e9, 1e-12));
  CHECK(c.max_slope() == 1e11);

  SECTION("energy density is the integral of stress") {
    for (double e : {0.003, 0.01, 0.017, 0.04}) {
      const int n = 20000;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += c.stress((i + 0.5) * e / n) * e / n;
      CHECK_THAT(c.energy_density(e), WithinRel(acc, 1e-6));
    }
  }
  SECTION("strain_at inverts stress") {
    for (double e : {0.001, 0.012, 0.025}) CHECK_THAT(c.strain_at(c.stress(e)), WithinRel(e, 1e-12));
  }
}

TEST_CASE("stress-strain curve rejects bad knots") {
  CHECK_THROWS_AS(StressStrainCurve({{0.01, 1e9}, {0.005, 2e9}}), InvalidInput);
  CHECK_THROWS_AS(StressStrainCurve({{0.01, 1e9}, {0.02, 0.5e9}}), InvalidInput);
  CHECK_THROWS_AS(StressStrainCurve({{0.0, 1.0}, {0.01, 1e9}}), InvalidInput);
}

TEST_CASE("Kevlar-29 package geometry") {
  const auto f = kevlar29();
  CHECK(f.ply_count == 40);
  CHECK_THAT(f.ply_areal_density(), WithinRel(0.485, 1e-12));
  CHECK_THAT(f.ply_thickness_m(), WithinRel(0.485 / 1440.0, 1e-12));
  CHECK_THAT(f.limiting_strain(), WithinRel(0.02, 1e-12));
  CHECK(f.adhesive_thickness() == f.ply_thickness_m());

  const auto g = f.with_plies(100);
  CHECK(g.ply_count == 100);
  CHECK_THAT(g.ply_areal_density(), WithinRel(f.ply_areal_density(), 1e-12));
  CHECK_THAT(g.areal_density_kgm2, WithinRel(48.5, 1e-12));
  CHECK(kevlar29(30).ply_count == 30);
}

TEST_CASE("fabric validation") {
  auto f = kevlar29();
  CHECK_NOTHROW(f.validate());
  f.ply_count = 0;
  CHECK_THROWS_AS(f.validate(), InvalidInput);
  f = kevlar29();
  f.adhesive_shear_modulus_Pa = 0.0;
  CHECK_THROWS_WITH(f.validate(), ContainsSubstring("shear modulus"));
  f = kevlar29();
  f.prestrain = -1e-3;
  CHECK_THROWS_AS(f.validate(), InvalidInput);
}

TEST_CASE("projectile validation") {
  auto p = catalog_projectile("p1");
  p.yield_Pa = -1.0;
  CHECK_THROWS_WITH(p.validate(), ContainsSubstring("yield"));
  p = catalog_projectile("p1");
  p.mass_kg *= 1.1;
  CHECK_THROWS_AS(p.check_cylinder(0.01), InvalidInput);
}
