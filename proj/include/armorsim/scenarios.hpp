#pragma once

// Built-in composite-shield scenarios. The files under scenarios/ describe
// the same set in the config format.

#include <string>

#include "armorsim/materials.hpp"
#include "armorsim/pipeline.hpp"

namespace armorsim::scenarios {

inline ThinFacingStage steel_plate() { return {ThinFacingSpec{0.004, 500}, 1.0}; }

/// AK-47 through a 4 mm steel plate into 40 plies of Kevlar-29, with the
/// facing-exit state pinned to the published handoff.
inline Scenario pinned_handoff() {
  Scenario s;
  s.name = "ak47_steel_kevlar29_pinned";
  s.projectile = catalog_projectile("AK47");
  s.facing = steel_plate();
  s.backing = kevlar29(40);
  s.impact_velocity_mps = 740.0;
  s.handoff.velocity_mps = 567.0;
  s.handoff.mass_kg = 0.003;
  s.handoff.diameter_m = 0.0072;
  return s;
}

/// M-16 through the same plate into Kevlar-29 with ply modulus `ply_modulus_Pa`.
inline Scenario ply_modulus(double ply_modulus_Pa) {
  Scenario s;
  s.name = "m16_steel_kevlar29_modulus";
  s.projectile = catalog_projectile("M16");
  s.facing = steel_plate();
  FabricSpec f = kevlar29(40);
  f.ply_curve = StressStrainCurve::linear(ply_modulus_Pa);
  s.backing = f;
  s.impact_velocity_mps = 1000.0;
  s.handoff.velocity_mps = 567.0;
  s.handoff.mass_kg = 0.011;
  s.handoff.diameter_m = 0.0095;
  return s;
}

/// Stopping-power study: bullet `bullet` ("M16" at 1000 m/s or "AK47" at
/// 740 m/s) through the steel plate, computed handoff, Kevlar-29 backing.
inline Scenario stopping_power(const std::string& bullet, int plies = 40) {
  Scenario s;
  s.name = "stopping_" + bullet + "_steel_kevlar29";
  s.projectile = catalog_projectile(bullet);
  s.facing = steel_plate();
  s.backing = kevlar29(plies);
  s.impact_velocity_mps = bullet == "M16" ? 1000.0 : 740.0;
  return s;
}

/// AK-47 at 740 m/s into a 10 mm ceramic or FGM facing ("ceramic_ref" or
/// "fgm_ref"), backed by 30 plies of Kevlar-29.
inline Scenario graded_facing(const std::string& facing) {
  Scenario s;
  s.name = "ak47_" + facing + "_kevlar29";
  s.projectile = catalog_projectile("AK47");
  s.facing = ThickFacingStage{catalog_facing(facing)};
  s.backing = kevlar29(30);
  s.impact_velocity_mps = 740.0;
  return s;
}

/// Long rod p1 into the semi-infinite steel target t3.
inline Scenario rod(const std::string& projectile = "p1", const std::string& target = "t3",
                    double velocity_mps = 1500.0) {
  Scenario s;
  s.name = "rod_" + projectile + "_" + target;
  s.projectile = catalog_projectile(projectile);
  s.facing = ThickFacingStage{catalog_facing(target)};
  s.impact_velocity_mps = velocity_mps;
  return s;
}

}  // namespace armorsim::scenarios
