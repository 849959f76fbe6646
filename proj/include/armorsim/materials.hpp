#pragma once

// Material and geometry descriptions: impactors, facings, fabric packages,
// depth-dependent strength profiles and the built-in material catalog.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "armorsim/error.hpp"

namespace armorsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Impactor (bullet or long rod). The jet model idealizes it as a cylinder of
/// radius `radius_m` and length `length_m`.
struct ProjectileSpec {
  std::string name;
  double mass_kg = 0.0;
  double diameter_m = 0.0;
  double length_m = 0.0;
  double radius_m = 0.0;
  double density_kgm3 = 0.0;
  double yield_Pa = 0.0;     // static yield limit of the projectile material
  double strength_Pa = 0.0;  // dynamic strength factor used in the Bernoulli balance
  std::optional<double> perforation_factor;  // thin-facing fit factor f
  double residual_diameter_ratio = 1.0;      // d_r / d after thin-facing perforation

  double cylinder_mass_kg() const {
    return density_kgm3 * kPi * radius_m * radius_m * length_m;
  }

  void validate() const {
    auto positive = [&](double v, const char* what) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidInput("projectile '" + name + "': " + what + " must be positive and finite");
    };
    positive(mass_kg, "mass");
    positive(diameter_m, "diameter");
    positive(length_m, "length");
    positive(radius_m, "radius");
    positive(density_kgm3, "density");
    positive(yield_Pa, "yield limit");
    positive(strength_Pa, "strength factor");
    positive(residual_diameter_ratio, "residual diameter ratio");
    if (perforation_factor) positive(*perforation_factor, "perforation factor");
  }

  /// Throws unless `mass_kg` matches the cylinder idealization within `rel_tol`.
  void check_cylinder(double rel_tol) const {
    const double cyl = cylinder_mass_kg();
    if (std::abs(cyl - mass_kg) > rel_tol * mass_kg)
      throw InvalidInput("projectile '" + name + "': mass " + std::to_string(mass_kg) +
                         " kg inconsistent with cylinder mass " + std::to_string(cyl) + " kg");
  }
};

/// Strength of the target material at a given depth.
struct StrengthAtDepth {
  double yield_Pa;
  double strength_Pa;
};

/// Depth-dependent target strength: constant, or a linear ramp from surface
/// values to terminal values over `ramp_depth_m`, constant afterwards.
struct StrengthProfile {
  enum class Kind { constant, linear_ramp };

  Kind kind = Kind::constant;
  double surface_yield_Pa = 0.0;
  double surface_strength_Pa = 0.0;
  double terminal_yield_Pa = 0.0;
  double terminal_strength_Pa = 0.0;
  double ramp_depth_m = 0.0;

  static StrengthProfile constant(double yield_Pa, double strength_Pa) {
    return {Kind::constant, yield_Pa, strength_Pa, yield_Pa, strength_Pa, 0.0};
  }

  static StrengthProfile ramp(double yield0, double strength0, double yield1, double strength1,
                              double depth_m) {
    return {Kind::linear_ramp, yield0, strength0, yield1, strength1, depth_m};
  }

  void validate() const {
    if (!(surface_yield_Pa > 0.0) || !(surface_strength_Pa > 0.0))
      throw InvalidInput("strength profile: surface values must be positive");
    if (kind == Kind::linear_ramp) {
      if (!(terminal_yield_Pa > 0.0) || !(terminal_strength_Pa > 0.0))
        throw InvalidInput("strength profile: terminal values must be positive");
      if (!(ramp_depth_m > 0.0)) throw InvalidInput("strength profile: ramp depth must be positive");
    }
  }
};

inline StrengthAtDepth eval_profile(const StrengthProfile& p, double depth_m) {
  if (p.kind == StrengthProfile::Kind::constant || depth_m <= 0.0)
    return {p.surface_yield_Pa, p.surface_strength_Pa};
  if (depth_m >= p.ramp_depth_m) return {p.terminal_yield_Pa, p.terminal_strength_Pa};
  const double s = depth_m / p.ramp_depth_m;
  return {p.surface_yield_Pa + s * (p.terminal_yield_Pa - p.surface_yield_Pa),
          p.surface_strength_Pa + s * (p.terminal_strength_Pa - p.surface_strength_Pa)};
}

/// Thick (metal / ceramic / FGM) facing for the jet model.
struct ThickFacingSpec {
  std::string name;
  double density_kgm3 = 0.0;
  StrengthProfile profile;
  double thickness_m = kInfinity;  // infinity => semi-infinite target

  bool semi_infinite() const { return std::isinf(thickness_m); }

  void validate() const {
    if (!(density_kgm3 > 0.0)) throw InvalidInput("facing '" + name + "': density must be positive");
    if (!(thickness_m > 0.0)) throw InvalidInput("facing '" + name + "': thickness must be positive");
    profile.validate();
  }
};

/// Thin hard-steel facing. Hardness is the raw Brinell number.
struct ThinFacingSpec {
  double thickness_m = 0.0;
  double brinell = 0.0;

  void validate() const {
    if (!(thickness_m > 0.0)) throw InvalidInput("thin facing: thickness must be positive");
    if (!(brinell > 0.0)) throw InvalidInput("thin facing: hardness must be positive");
  }
};

/// Piecewise-linear stress-strain diagram through the origin. Past the last
/// knot the final segment slope is extrapolated.
class StressStrainCurve {
 public:
  StressStrainCurve() = default;

  explicit StressStrainCurve(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.empty() || knots_.front().first != 0.0) knots_.insert(knots_.begin(), {0.0, 0.0});
    if (knots_.front().second != 0.0) throw InvalidInput("stress-strain curve must pass through the origin");
    if (knots_.size() < 2) throw InvalidInput("stress-strain curve needs at least one segment");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i].first > knots_[i - 1].first))
        throw InvalidInput("stress-strain curve strains must be strictly increasing");
      if (knots_[i].second < knots_[i - 1].second)
        throw InvalidInput("stress-strain curve must be nondecreasing");
    }
  }

  static StressStrainCurve linear(double modulus_Pa) {
    return StressStrainCurve({{0.0, 0.0}, {1.0, modulus_Pa}});
  }

  double stress(double strain) const {
    if (strain <= 0.0) return 0.0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), strain,
                               [](double e, const auto& k) { return e < k.first; });
    std::size_t hi = it == knots_.end() ? knots_.size() - 1 : std::size_t(it - knots_.begin());
    std::size_t lo = hi - 1;
    const auto& [e0, s0] = knots_[lo];
    const auto& [e1, s1] = knots_[hi];
    return s0 + (s1 - s0) * (strain - e0) / (e1 - e0);
  }

  /// Strain energy density, integral of stress from 0 to `strain`.
  double energy_density(double strain) const {
    if (strain <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const auto& [e0, s0] = knots_[i - 1];
      const auto& [e1, s1] = knots_[i];
      const bool last = i + 1 == knots_.size();
      const double top = last ? strain : std::min(strain, e1);
      const double s_top = s0 + (s1 - s0) * (top - e0) / (e1 - e0);
      acc += 0.5 * (s0 + s_top) * (top - e0);
      if (strain <= e1) break;
    }
    return acc;
  }

  /// Smallest strain where the curve reaches `stress_Pa`; infinity if never.
  double strain_at(double stress_Pa) const {
    if (stress_Pa <= 0.0) return 0.0;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const auto& [e0, s0] = knots_[i - 1];
      const auto& [e1, s1] = knots_[i];
      if (stress_Pa <= s1) {
        if (s1 == s0) return e0;
        return e0 + (stress_Pa - s0) * (e1 - e0) / (s1 - s0);
      }
    }
    const auto& [e0, s0] = knots_[knots_.size() - 2];
    const auto& [e1, s1] = knots_.back();
    if (s1 == s0) return kInfinity;
    return e1 + (stress_Pa - s1) * (e1 - e0) / (s1 - s0);
  }

  double max_slope() const {
    double m = 0.0;
    for (std::size_t i = 1; i < knots_.size(); ++i)
      m = std::max(m, (knots_[i].second - knots_[i - 1].second) / (knots_[i].first - knots_[i - 1].first));
    return m;
  }

  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_{{0.0, 0.0}, {1.0, 0.0}};
};

inline double curve_stress(const StressStrainCurve& curve, double strain) { return curve.stress(strain); }

/// Multi-ply fabric package glued by an adhesive.
struct FabricSpec {
  std::string name;
  int ply_count = 0;
  double areal_density_kgm2 = 0.0;  // whole package
  StressStrainCurve ply_curve;
  double ply_tensile_limit_Pa = kInfinity;
  double adhesive_shear_modulus_Pa = 0.0;
  double adhesive_shear_limit_Pa = kInfinity;
  double adhesive_normal_modulus_Pa = 0.0;
  double adhesive_normal_limit_Pa = kInfinity;
  /// Adhesive layer thickness; when unset it equals the ply thickness.
  std::optional<double> adhesive_thickness_m;
  /// Density of the ply material; converts areal density to ply thickness.
  double ply_density_kgm3 = 1440.0;
  /// Uniform in-plane prestrain of every ply (zero for a slack package).
  double prestrain = 0.0;

  double ply_areal_density() const { return areal_density_kgm2 / ply_count; }
  double ply_thickness_m() const { return ply_areal_density() / ply_density_kgm3; }
  double adhesive_thickness() const { return adhesive_thickness_m.value_or(ply_thickness_m()); }
  double ply_pitch_m() const { return ply_thickness_m() + adhesive_thickness(); }
  double limiting_strain() const { return ply_curve.strain_at(ply_tensile_limit_Pa); }

  /// Same material with a different ply count and per-ply areal density kept.
  FabricSpec with_plies(int n) const {
    FabricSpec out = *this;
    if (ply_count > 0) out.areal_density_kgm2 = ply_areal_density() * n;
    out.ply_count = n;
    return out;
  }

  void validate() const {
    if (ply_count < 1) throw InvalidInput("fabric '" + name + "': ply count must be at least 1");
    auto positive = [&](double v, const char* what) {
      if (!(v > 0.0)) throw InvalidInput("fabric '" + name + "': " + what + " must be positive");
    };
    positive(areal_density_kgm2, "areal density");
    positive(ply_curve.max_slope(), "ply modulus");
    positive(ply_tensile_limit_Pa, "ply tensile limit");
    positive(adhesive_shear_modulus_Pa, "adhesive shear modulus");
    positive(adhesive_shear_limit_Pa, "adhesive shear limit");
    positive(adhesive_normal_modulus_Pa, "adhesive normal modulus");
    positive(adhesive_normal_limit_Pa, "adhesive normal limit");
    positive(ply_density_kgm3, "ply density");
    positive(adhesive_thickness(), "adhesive thickness");
    if (prestrain < 0.0) throw InvalidInput("fabric '" + name + "': prestrain must be nonnegative");
  }
};

// ---------------------------------------------------------------------------
// Catalog

/// Caliber of the M-16 bullet as quoted alongside its mass and length. The
/// catalog default is 5.56 mm, which reproduces the measured shot series.
inline constexpr double kM16QuotedCaliber_m = 5.62e-3;
inline constexpr double kM16Caliber_m = 5.56e-3;

namespace detail {

inline ProjectileSpec rod(std::string name, double diameter, double slenderness, double density,
                          double yield, double strength) {
  ProjectileSpec p;
  p.name = std::move(name);
  p.diameter_m = diameter;
  p.radius_m = diameter / 2;
  p.length_m = slenderness * diameter;
  p.density_kgm3 = density;
  p.yield_Pa = yield;
  p.strength_Pa = strength;
  p.mass_kg = p.cylinder_mass_kg();
  return p;
}

inline ThickFacingSpec steel_target(std::string name, double yield, double strength) {
  return {std::move(name), 7850.0, StrengthProfile::constant(yield, strength), kInfinity};
}

}  // namespace detail

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"p1", "p2", "t1", "t2", "t3",
                                              "M16", "AK47", "ceramic_ref", "fgm_ref"};
  return names;
}

using CatalogEntry = std::variant<ProjectileSpec, ThickFacingSpec>;

inline CatalogEntry catalog_lookup(std::string_view name) {
  if (name == "p1") return detail::rod("p1", 5.4e-3, 10.0, 7850.0, 770e6, 1100e6);
  if (name == "p2") return detail::rod("p2", 6.0e-3, 10.4, 17000.0, 750e6, 1550e6);
  if (name == "t1") return detail::steel_target("t1", 1000e6, 5175e6);
  if (name == "t2") return detail::steel_target("t2", 610e6, 4400e6);
  if (name == "t3") return detail::steel_target("t3", 500e6, 3450e6);
  if (name == "M16" || name == "AK47") {
    // Bullets carry the steel strength constants of p1; density follows from
    // the cylinder idealization (M16: declared length; AK47: steel density).
    ProjectileSpec p;
    p.name = std::string(name);
    p.yield_Pa = 770e6;
    p.strength_Pa = 1100e6;
    if (name == "M16") {
      p.mass_kg = 3.6e-3;
      p.diameter_m = kM16Caliber_m;
      p.radius_m = p.diameter_m / 2;
      p.length_m = 15e-3;
      p.density_kgm3 = p.mass_kg / (kPi * p.radius_m * p.radius_m * p.length_m);
      p.perforation_factor = 2.47e7;
      p.residual_diameter_ratio = 1.27;
    } else {
      p.mass_kg = 9.7e-3;
      p.diameter_m = 7.6e-3;
      p.radius_m = p.diameter_m / 2;
      p.density_kgm3 = 7850.0;
      p.length_m = p.mass_kg / (p.density_kgm3 * kPi * p.radius_m * p.radius_m);
      p.perforation_factor = 2.95e7;
      p.residual_diameter_ratio = 1.33;
    }
    return p;
  }
  if (name == "ceramic_ref")
    return ThickFacingSpec{"ceramic_ref", 3000.0, StrengthProfile::constant(500e6, 1.5e9), 10e-3};
  if (name == "fgm_ref")
    return ThickFacingSpec{"fgm_ref", 3000.0, StrengthProfile::ramp(500e6, 1.5e9, 250e6, 0.75e9, 10e-3),
                           10e-3};

  std::string msg = "unknown catalog entry '" + std::string(name) + "'; available:";
  for (const auto& n : catalog_names()) msg += " " + n;
  throw UnknownName(msg);
}

inline ProjectileSpec catalog_projectile(std::string_view name) {
  auto e = catalog_lookup(name);
  if (auto* p = std::get_if<ProjectileSpec>(&e)) return *p;
  throw UnknownName("catalog entry '" + std::string(name) + "' is a facing, not a projectile");
}

inline ThickFacingSpec catalog_facing(std::string_view name) {
  auto e = catalog_lookup(name);
  if (auto* f = std::get_if<ThickFacingSpec>(&e)) return *f;
  throw UnknownName("catalog entry '" + std::string(name) + "' is a projectile, not a facing");
}

/// Kevlar-29 package (40 plies, 19.4 kg/m^2) with linear ply and adhesive laws.
inline FabricSpec kevlar29(int plies = 40) {
  FabricSpec f;
  f.name = "kevlar29";
  f.ply_count = 40;
  f.areal_density_kgm2 = 19.4;
  f.ply_curve = StressStrainCurve::linear(70e9);
  f.ply_tensile_limit_Pa = 1.4e9;
  f.adhesive_shear_modulus_Pa = 0.5e9;
  f.adhesive_shear_limit_Pa = 25e6;
  f.adhesive_normal_modulus_Pa = 2.0e9;
  f.adhesive_normal_limit_Pa = 0.1e9;
  return plies == 40 ? f : f.with_plies(plies);
}

inline FabricSpec catalog_fabric(std::string_view name) {
  if (name == "kevlar29") return kevlar29();
  throw UnknownName("unknown fabric '" + std::string(name) + "'; available: kevlar29");
}

}  // namespace armorsim
