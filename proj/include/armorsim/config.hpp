#pragma once

// Scenario documents (JSON, "version": 1). Every key is checked against the
// schema before any solver runs; diagnostics carry the dotted key path and
// the line where the key appears.

#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "armorsim/error.hpp"
#include "armorsim/materials.hpp"
#include "armorsim/pipeline.hpp"

namespace armorsim::config {

using json = nlohmann::json;

inline constexpr int kVersion = 1;

namespace detail {

/// Best-effort line of a dotted key path in the source text: each component
/// is searched as a quoted key after the previous match.
inline int line_of(const std::string& text, const std::string& path) {
  if (text.empty() || path.empty()) return 0;
  std::size_t pos = 0, start = 0;
  bool found = false;
  while (start <= path.size()) {
    auto dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (auto br = key.find('['); br != std::string::npos) key.resize(br);
    if (!key.empty()) {
      const auto hit = text.find('"' + key + '"', pos);
      if (hit == std::string::npos) break;
      pos = hit;
      found = true;
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (!found) return 0;
  return 1 + int(std::count(text.begin(), text.begin() + std::ptrdiff_t(pos), '\n'));
}

class Node {
 public:
  Node(const json& j, std::string path, const std::string& text) : j_(j), path_(std::move(path)), text_(text) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string p = sub(key);
    throw ConfigError(p, what, line_of(text_, p));
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    throw ConfigError(path_.empty() ? "<root>" : path_, what, line_of(text_, path_));
  }

  void require_object() const {
    if (!j_.is_object()) fail_here(std::string("expected an object, got ") + j_.type_name());
  }

  void allow(std::initializer_list<const char*> keys) const {
    require_object();
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) {
        std::string list;
        for (const auto& k : ok) list += (list.empty() ? "" : ", ") + k;
        fail(it.key(), "unknown key (allowed: " + list + ")");
      }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  Node child(const std::string& key) const { return Node(j_.at(key), sub(key), text_); }

  double number(const std::string& key) const {
    if (!has(key)) fail(key, "required number is missing");
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(key, std::string("expected a number, got ") + v.type_name());
    return v.get<double>();
  }

  std::optional<double> opt_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  double number_or(const std::string& key, double def) const { return opt_number(key).value_or(def); }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }

  std::optional<double> opt_positive(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return positive(key);
  }

  long integer(const std::string& key) const {
    if (!has(key)) fail(key, "required integer is missing");
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, std::string("expected an integer, got ") + v.type_name());
    return v.get<long>();
  }

  long integer_or(const std::string& key, long def) const { return has(key) ? integer(key) : def; }

  std::string string(const std::string& key) const {
    if (!has(key)) fail(key, "required string is missing");
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(key, std::string("expected a string, got ") + v.type_name());
    return v.get<std::string>();
  }

  bool boolean_or(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(key, std::string("expected a boolean, got ") + v.type_name());
    return v.get<bool>();
  }

 private:
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  const std::string& text_;
};

inline ProjectileSpec parse_projectile(const Node& n) {
  if (n.raw().is_string()) {
    try {
      return catalog_projectile(n.raw().get<std::string>());
    } catch (const Error& e) {
      n.fail_here(e.what());
    }
  }
  n.allow({"catalog", "name", "mass_kg", "diameter_m", "length_m", "radius_m", "density_kgm3", "yield_Pa",
           "strength_Pa", "perforation_factor", "residual_diameter_ratio"});
  ProjectileSpec p;
  if (n.has("catalog")) {
    try {
      p = catalog_projectile(n.string("catalog"));
    } catch (const UnknownName& e) {
      n.fail("catalog", e.what());
    }
  } else {
    p.name = "custom";
    for (const char* k : {"mass_kg", "diameter_m", "length_m", "density_kgm3", "yield_Pa", "strength_Pa"})
      if (!n.has(k)) n.fail(k, "required for an inline projectile");
  }
  if (n.has("name")) p.name = n.string("name");
  if (auto v = n.opt_positive("mass_kg")) p.mass_kg = *v;
  if (auto v = n.opt_positive("diameter_m")) {
    p.diameter_m = *v;
    if (!n.has("radius_m")) p.radius_m = 0.5 * *v;
  }
  if (auto v = n.opt_positive("length_m")) p.length_m = *v;
  if (auto v = n.opt_positive("radius_m")) p.radius_m = *v;
  if (auto v = n.opt_positive("density_kgm3")) p.density_kgm3 = *v;
  if (auto v = n.opt_positive("yield_Pa")) p.yield_Pa = *v;
  if (auto v = n.opt_positive("strength_Pa")) p.strength_Pa = *v;
  if (auto v = n.opt_positive("perforation_factor")) p.perforation_factor = *v;
  if (auto v = n.opt_positive("residual_diameter_ratio")) p.residual_diameter_ratio = *v;
  return p;
}

inline StrengthProfile parse_profile(const Node& n) {
  n.allow({"kind", "yield0_Pa", "strength0_Pa", "yield1_Pa", "strength1_Pa", "ramp_depth_m"});
  const std::string kind = n.string("kind");
  if (kind == "constant") return StrengthProfile::constant(n.positive("yield0_Pa"), n.positive("strength0_Pa"));
  if (kind == "linear_ramp")
    return StrengthProfile::ramp(n.positive("yield0_Pa"), n.positive("strength0_Pa"), n.positive("yield1_Pa"),
                                 n.positive("strength1_Pa"), n.positive("ramp_depth_m"));
  n.fail("kind", "expected 'constant' or 'linear_ramp', got '" + kind + "'");
}

inline FacingStage parse_facing(const Node& n) {
  n.allow({"kind", "h_m", "BH", "mass_retention", "catalog", "density_kgm3", "thickness_m", "semi_infinite",
           "profile"});
  const std::string kind = n.string("kind");
  if (kind == "thin") {
    for (const char* k : {"catalog", "density_kgm3", "thickness_m", "semi_infinite", "profile"})
      if (n.has(k)) n.fail(k, "not valid for a thin facing");
    ThinFacingStage t;
    t.spec.thickness_m = n.positive("h_m");
    t.spec.brinell = n.positive("BH");
    t.mass_retention = n.number_or("mass_retention", 1.0);
    if (!(t.mass_retention > 0.0) || t.mass_retention > 1.6) n.fail("mass_retention", "must lie in (0, 1.6]");
    return t;
  }
  if (kind != "thick") n.fail("kind", "expected 'thin' or 'thick', got '" + kind + "'");
  for (const char* k : {"h_m", "BH", "mass_retention"})
    if (n.has(k)) n.fail(k, "not valid for a thick facing");
  ThickFacingStage t;
  if (n.has("catalog")) {
    try {
      t.spec = catalog_facing(n.string("catalog"));
    } catch (const Error& e) {
      n.fail("catalog", e.what());
    }
  } else {
    if (!n.has("density_kgm3")) n.fail("density_kgm3", "required for an inline thick facing");
    if (!n.has("profile")) n.fail("profile", "required for an inline thick facing");
    t.spec.name = "custom";
  }
  if (auto v = n.opt_positive("density_kgm3")) t.spec.density_kgm3 = *v;
  if (n.has("profile")) t.spec.profile = parse_profile(n.child("profile"));
  if (auto v = n.opt_positive("thickness_m")) t.spec.thickness_m = *v;
  if (n.boolean_or("semi_infinite", false)) {
    if (n.has("thickness_m")) n.fail("semi_infinite", "conflicts with thickness_m");
    t.spec.thickness_m = kInfinity;
  }
  return t;
}

inline StressStrainCurve parse_curve(const Node& n) {
  const auto& a = n.raw();
  if (!a.is_array() || a.empty()) n.fail_here("expected a nonempty array of [strain, stress_Pa]");
  std::vector<std::pair<double, double>> knots;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& k = a[i];
    if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
      n.fail_here("element " + std::to_string(i) + ": expected [strain, stress_Pa]");
    knots.emplace_back(k[0].get<double>(), k[1].get<double>());
  }
  try {
    return StressStrainCurve(std::move(knots));
  } catch (const InvalidInput& e) {
    n.fail_here(e.what());
  }
}

inline FabricSpec parse_backing(const Node& n) {
  n.allow({"catalog", "plies", "areal_density_kgm2", "E_t_Pa", "curve", "tensile_limit_Pa", "shear_modulus_Pa",
           "shear_limit_Pa", "normal_modulus_Pa", "normal_limit_Pa", "adhesive_thickness_m", "ply_density_kgm3",
           "prestrain"});
  FabricSpec f;
  if (n.has("catalog")) {
    try {
      f = catalog_fabric(n.string("catalog"));
    } catch (const UnknownName& e) {
      n.fail("catalog", e.what());
    }
  } else {
    for (const char* k : {"plies", "areal_density_kgm2", "tensile_limit_Pa", "shear_modulus_Pa", "shear_limit_Pa",
                          "normal_modulus_Pa", "normal_limit_Pa"})
      if (!n.has(k)) n.fail(k, "required for an inline backing");
    if (!n.has("E_t_Pa") && !n.has("curve")) n.fail("E_t_Pa", "inline backing needs E_t_Pa or curve");
    f.name = "custom";
  }
  if (n.has("E_t_Pa") && n.has("curve")) n.fail("curve", "give either E_t_Pa or curve, not both");
  if (n.has("plies")) {
    const long p = n.integer("plies");
    if (p < 0 || p > 200) n.fail("plies", "must lie in [0, 200]");
    if (!n.has("areal_density_kgm2") && f.ply_count > 0)
      f = f.with_plies(int(p));
    else
      f.ply_count = int(p);
  }
  if (auto v = n.opt_positive("areal_density_kgm2")) f.areal_density_kgm2 = *v;
  if (auto v = n.opt_positive("E_t_Pa")) f.ply_curve = StressStrainCurve::linear(*v);
  if (n.has("curve")) f.ply_curve = parse_curve(n.child("curve"));
  if (auto v = n.opt_positive("tensile_limit_Pa")) f.ply_tensile_limit_Pa = *v;
  if (auto v = n.opt_positive("shear_modulus_Pa")) f.adhesive_shear_modulus_Pa = *v;
  if (auto v = n.opt_positive("shear_limit_Pa")) f.adhesive_shear_limit_Pa = *v;
  if (auto v = n.opt_positive("normal_modulus_Pa")) f.adhesive_normal_modulus_Pa = *v;
  if (auto v = n.opt_positive("normal_limit_Pa")) f.adhesive_normal_limit_Pa = *v;
  if (auto v = n.opt_positive("adhesive_thickness_m")) f.adhesive_thickness_m = *v;
  if (auto v = n.opt_positive("ply_density_kgm3")) f.ply_density_kgm3 = *v;
  if (auto v = n.opt_number("prestrain")) {
    if (*v < 0.0) n.fail("prestrain", "must be nonnegative");
    f.prestrain = *v;
  }
  return f;
}

inline void parse_solver(const Node& n, Scenario& s) {
  n.allow({"jet", "fabric", "workers"});
  if (n.has("workers")) {
    const long w = n.integer("workers");
    if (w < 0 || w > 1024) n.fail("workers", "must lie in [0, 1024]");
    s.workers = int(w);
  }
  if (n.has("jet")) {
    const Node j = n.child("jet");
    j.allow({"dt_s", "max_relative_dv", "max_halvings", "tolerance", "max_iterations", "relaxation",
             "projectile_lambda", "record_every"});
    if (auto v = j.opt_positive("dt_s")) s.jet.dt = *v;
    if (auto v = j.opt_positive("max_relative_dv")) s.jet.max_relative_dv = *v;
    if (j.has("max_halvings")) s.jet.max_halvings = int(j.integer("max_halvings"));
    if (auto v = j.opt_positive("tolerance")) s.jet.iteration.tolerance = *v;
    if (j.has("max_iterations")) {
      const long m = j.integer("max_iterations");
      if (m < 1) j.fail("max_iterations", "must be at least 1");
      s.jet.iteration.max_iterations = int(m);
    }
    if (auto v = j.opt_positive("relaxation")) {
      if (*v > 1.0) j.fail("relaxation", "must lie in (0, 1]");
      s.jet.iteration.relaxation = *v;
    }
    if (j.has("projectile_lambda")) {
      const auto v = j.string("projectile_lambda");
      if (v == "geometric")
        s.jet.iteration.projectile_lambda = jet::ProjectileLambda::geometric;
      else if (v == "printed")
        s.jet.iteration.projectile_lambda = jet::ProjectileLambda::printed;
      else
        j.fail("projectile_lambda", "expected 'geometric' or 'printed', got '" + v + "'");
    }
    if (j.has("record_every")) {
      const long r = j.integer("record_every");
      if (r < 1) j.fail("record_every", "must be at least 1");
      s.jet.record_every = int(r);
    }
  }
  if (n.has("fabric")) {
    const Node f = n.child("fabric");
    f.allow({"outer_radius_m", "radial_cells", "t_max_s", "dt_s", "cfl_safety", "penalty_factor",
             "perforation_margin", "snapshot_interval_s", "history_interval_s"});
    if (auto v = f.opt_positive("outer_radius_m")) s.fabric.mesh.outer_radius_m = *v;
    if (f.has("radial_cells")) {
      const long c = f.integer("radial_cells");
      if (c < 50) f.fail("radial_cells", "must be at least 50");
      s.fabric.mesh.radial_cells = int(c);
    }
    if (auto v = f.opt_positive("t_max_s")) s.fabric.t_max_s = *v;
    if (auto v = f.opt_positive("dt_s")) s.fabric.dt_s = *v;
    if (auto v = f.opt_positive("cfl_safety")) {
      if (*v > 1.0) f.fail("cfl_safety", "must lie in (0, 1]");
      s.fabric.cfl_safety = *v;
    }
    if (auto v = f.opt_positive("penalty_factor")) s.fabric.penalty_factor = *v;
    if (auto v = f.opt_positive("perforation_margin")) s.fabric.perforation_margin = *v;
    if (auto v = f.opt_number("snapshot_interval_s")) {
      if (*v < 0.0) f.fail("snapshot_interval_s", "must be nonnegative");
      s.fabric.snapshot_interval_s = *v;
    }
    if (auto v = f.opt_number("history_interval_s")) {
      if (*v < 0.0) f.fail("history_interval_s", "must be nonnegative");
      s.fabric.history_interval_s = *v;
    }
  }
}

}  // namespace detail

/// Builds a scenario from document text.
inline Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = 1 + int(std::count(text.begin(), text.begin() + std::ptrdiff_t(std::min(e.byte, text.size())),
                                        '\n'));
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what(), line);
  }
  const detail::Node root(doc, "", text);
  root.allow({"version", "name", "projectile", "facing", "backing", "impact", "solver", "output"});
  if (!root.has("version")) root.fail("version", "required (current version is 1)");
  if (root.integer("version") != kVersion)
    root.fail("version", "unsupported version " + std::to_string(root.integer("version")));

  Scenario s;
  if (root.has("name")) s.name = root.string("name");
  if (!root.has("projectile")) root.fail("projectile", "required");
  s.projectile = detail::parse_projectile(root.child("projectile"));
  if (!root.has("facing")) root.fail("facing", "required");
  s.facing = detail::parse_facing(root.child("facing"));
  if (root.has("backing")) s.backing = detail::parse_backing(root.child("backing"));

  if (!root.has("impact")) root.fail("impact", "required");
  const auto impact = root.child("impact");
  impact.allow({"V0_mps", "handoff"});
  s.impact_velocity_mps = impact.positive("V0_mps");
  if (impact.has("handoff")) {
    const auto h = impact.child("handoff");
    h.allow({"Vr_mps", "mr_kg", "dr_m"});
    if (auto v = h.opt_number("Vr_mps")) {
      if (*v < 0.0) h.fail("Vr_mps", "must be nonnegative");
      s.handoff.velocity_mps = *v;
    }
    s.handoff.mass_kg = h.opt_positive("mr_kg");
    s.handoff.diameter_m = h.opt_positive("dr_m");
  }
  if (root.has("solver")) detail::parse_solver(root.child("solver"), s);
  if (root.has("output")) {
    const auto o = root.child("output");
    o.allow({"trace", "snapshots"});
    s.output.write_trace = o.boolean_or("trace", true);
    s.output.write_snapshots = o.boolean_or("snapshots", true);
  }
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("<scenario>", e.what());
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace armorsim::config
