#pragma once

// Report document and artifact files for a scenario run or sweep. The report
// holds no timestamps or host data, so identical runs give identical bytes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "armorsim/csv.hpp"
#include "armorsim/pipeline.hpp"

namespace armorsim::report {

using ojson = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

namespace detail {

inline ojson finite_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

inline ojson curve_json(const StressStrainCurve& c) {
  ojson a = ojson::array();
  for (const auto& [e, s] : c.knots()) a.push_back({e, s});
  return a;
}

inline ojson projectile_json(const ProjectileSpec& p) {
  ojson j;
  j["name"] = p.name;
  j["mass_kg"] = p.mass_kg;
  j["diameter_m"] = p.diameter_m;
  j["length_m"] = p.length_m;
  j["radius_m"] = p.radius_m;
  j["density_kgm3"] = p.density_kgm3;
  j["yield_Pa"] = p.yield_Pa;
  j["strength_Pa"] = p.strength_Pa;
  j["perforation_factor"] = p.perforation_factor ? ojson(*p.perforation_factor) : ojson(nullptr);
  j["residual_diameter_ratio"] = p.residual_diameter_ratio;
  return j;
}

inline ojson facing_json(const FacingStage& f) {
  ojson j;
  if (const auto* t = std::get_if<ThinFacingStage>(&f)) {
    j["kind"] = "thin";
    j["h_m"] = t->spec.thickness_m;
    j["BH"] = t->spec.brinell;
    j["mass_retention"] = t->mass_retention;
    return j;
  }
  const auto& s = std::get<ThickFacingStage>(f).spec;
  j["kind"] = "thick";
  j["name"] = s.name;
  j["density_kgm3"] = s.density_kgm3;
  j["thickness_m"] = finite_or_null(s.thickness_m);
  j["semi_infinite"] = s.semi_infinite();
  ojson p;
  p["kind"] = s.profile.kind == StrengthProfile::Kind::constant ? "constant" : "linear_ramp";
  p["yield0_Pa"] = s.profile.surface_yield_Pa;
  p["strength0_Pa"] = s.profile.surface_strength_Pa;
  p["yield1_Pa"] = s.profile.terminal_yield_Pa;
  p["strength1_Pa"] = s.profile.terminal_strength_Pa;
  p["ramp_depth_m"] = s.profile.ramp_depth_m;
  j["profile"] = p;
  return j;
}

inline ojson fabric_json(const FabricSpec& f) {
  ojson j;
  j["name"] = f.name;
  j["plies"] = f.ply_count;
  j["areal_density_kgm2"] = f.areal_density_kgm2;
  j["curve"] = curve_json(f.ply_curve);
  j["tensile_limit_Pa"] = finite_or_null(f.ply_tensile_limit_Pa);
  j["limiting_strain"] = finite_or_null(f.limiting_strain());
  j["shear_modulus_Pa"] = f.adhesive_shear_modulus_Pa;
  j["shear_limit_Pa"] = finite_or_null(f.adhesive_shear_limit_Pa);
  j["normal_modulus_Pa"] = f.adhesive_normal_modulus_Pa;
  j["normal_limit_Pa"] = finite_or_null(f.adhesive_normal_limit_Pa);
  if (f.ply_count > 0) {
    j["ply_thickness_m"] = f.ply_thickness_m();
    j["adhesive_thickness_m"] = f.adhesive_thickness();
  }
  j["ply_density_kgm3"] = f.ply_density_kgm3;
  j["prestrain"] = f.prestrain;
  return j;
}

inline ojson solver_json(const Scenario& s) {
  ojson jet;
  jet["dt_s"] = s.jet.dt;
  jet["max_relative_dv"] = s.jet.max_relative_dv;
  jet["max_halvings"] = s.jet.max_halvings;
  jet["tolerance"] = s.jet.iteration.tolerance;
  jet["max_iterations"] = s.jet.iteration.max_iterations;
  jet["relaxation"] = s.jet.iteration.relaxation;
  jet["projectile_lambda"] =
      s.jet.iteration.projectile_lambda == jet::ProjectileLambda::geometric ? "geometric" : "printed";
  jet["record_every"] = s.jet.record_every;
  ojson fab;
  fab["outer_radius_m"] = s.fabric.mesh.outer_radius_m;
  fab["radial_cells"] = s.fabric.mesh.radial_cells;
  fab["t_max_s"] = s.fabric.t_max_s;
  fab["dt_s"] = s.fabric.dt_s;
  fab["cfl_safety"] = s.fabric.cfl_safety;
  fab["penalty_factor"] = s.fabric.penalty_factor;
  fab["perforation_margin"] = s.fabric.perforation_margin;
  fab["snapshot_interval_s"] = s.fabric.snapshot_interval_s;
  fab["history_interval_s"] = s.fabric.history_interval_s;
  ojson j;
  j["jet"] = jet;
  j["fabric"] = fab;
  return j;
}

inline ojson handoff_json(const HandoffState& h) {
  return ojson{{"Vr_mps", h.velocity_mps}, {"mr_kg", h.mass_kg}, {"dr_m", h.diameter_m}};
}

}  // namespace detail

inline ojson scenario_json(const Scenario& s) {
  ojson j;
  j["name"] = s.name;
  j["projectile"] = detail::projectile_json(s.projectile);
  j["facing"] = detail::facing_json(s.facing);
  j["backing"] = s.backing ? detail::fabric_json(*s.backing) : ojson(nullptr);
  ojson impact;
  impact["V0_mps"] = s.impact_velocity_mps;
  ojson h = ojson::object();
  if (s.handoff.velocity_mps) h["Vr_mps"] = *s.handoff.velocity_mps;
  if (s.handoff.mass_kg) h["mr_kg"] = *s.handoff.mass_kg;
  if (s.handoff.diameter_m) h["dr_m"] = *s.handoff.diameter_m;
  impact["handoff_override"] = h;
  j["impact"] = impact;
  j["solver"] = detail::solver_json(s);
  return j;
}

inline ojson to_json(const ScenarioReport& r) {
  ojson j;
  j["report_version"] = kReportVersion;
  j["scenario"] = scenario_json(r.scenario);
  ojson f;
  if (r.thin) {
    f["kind"] = "thin";
    f["ballistic_limit_mps"] = r.thin->ballistic_limit_mps;
    f["residual_velocity_mps"] = r.thin->residual_velocity_mps;
    f["residual_diameter_m"] = r.thin->residual_diameter_m;
    f["residual_mass_kg"] = r.thin->residual_mass_kg;
    f["perforated"] = r.thin->perforated;
    f["artifact"] = "facing.csv";
  } else if (r.jet) {
    const auto& run = *r.jet;
    f["kind"] = "thick";
    f["stop_reason"] = std::string(jet::to_string(run.reason));
    f["detail"] = run.detail;
    f["steps"] = run.steps;
    f["rejected_steps"] = run.rejected_steps;
    f["max_iterations"] = run.max_iterations;
    f["max_residual"] = run.max_residual;
    const auto& st = run.final_state;
    f["final"] = {{"t_s", st.time_s},         {"V_mps", st.velocity_mps}, {"Lr_m", st.residual_length_m},
                  {"mass_kg", st.mass_kg},    {"P_m", st.depth_m},        {"Q_m3", st.crater_volume_m3},
                  {"P_over_L0", st.depth_m / run.initial_length}};
    if (run.exit)
      f["exit"] = {{"t_s", run.exit->time_s},
                   {"V_mps", run.exit->velocity_mps},
                   {"mass_kg", run.exit->mass_kg},
                   {"dr_m", run.exit->diameter_m},
                   {"P_m", run.exit->depth_m}};
    else
      f["exit"] = nullptr;
    if (run.first_closure) {
      const auto& c = *run.first_closure;
      f["first_closure"] = {{"Vt_minus", c.interface.penetration}, {"Vp_minus", c.interface.erosion},
                            {"Vt_plus", c.backward.target},        {"Vp_plus", c.backward.projectile},
                            {"R_m", c.radii.flow},                 {"R1_m", c.radii.cup},
                            {"R0_m", c.radii.crater},              {"sigma_t_plus_Pa", c.work.target},
                            {"sigma_p_plus_Pa", c.work.projectile}, {"iterations", c.iterations}};
    } else {
      f["first_closure"] = nullptr;
    }
    f["artifacts"] = {{"trace", "facing.csv"}, {"normalized", "facing_normalized.csv"}};
  }
  j["facing"] = f;
  if (r.handoff) {
    ojson h;
    h["computed"] = detail::handoff_json(*r.computed_handoff);
    h["used"] = detail::handoff_json(*r.handoff);
    h["overridden"] = r.scenario.handoff.any();
    j["handoff"] = h;
  } else {
    j["handoff"] = nullptr;
  }
  if (r.backing) {
    const auto& b = *r.backing;
    ojson o;
    o["status"] = fabric::to_string(b.status);
    o["Np"] = b.ply_count;
    o["t_end_us"] = b.t_end_s * 1e6;
    o["P_mm"] = b.depth_m * 1e3;
    o["Np_star"] = b.perforated_plies;
    o["Wc_J"] = b.absorbed_energy_J;
    o["Vr_mps"] = b.residual_velocity_mps;
    o["max_energy_error"] = b.max_energy_error;
    o["boundary_reached"] = b.boundary_reached;
    o["steps"] = b.steps;
    o["dt_s"] = b.dt_s;
    o["broken_segments"] = b.broken_segments;
    o["failed_links"] = b.failed_links;
    o["snapshots"] = b.snapshots.size();
    o["artifacts"] = {{"outcome", "backing.csv"}, {"history", "backing_history.csv"}, {"snapshots", "snapshots/"}};
    j["backing"] = o;
  } else {
    j["backing"] = nullptr;
  }
  j["outcome"] = to_string(r.outcome);
  ojson checks;
  if (r.jet) checks["jet_max_residual_le_1e-9"] = r.jet->max_residual <= 1e-9;
  if (r.backing) {
    checks["energy_balance_within_1pct"] = r.backing->max_energy_error < 0.01;
    checks["outer_boundary_undisturbed"] = !r.backing->boundary_reached;
  }
  j["checks"] = checks.is_null() ? ojson::object() : checks;
  return j;
}

inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + p.string() + "'");
}

inline constexpr const char* kThinFacingHeader = "V0_mps,Vbl_mps,Vrc_mps,dr_m,mr_kg,perforated";

/// Writes report.json and the per-stage files. Returns the written paths.
inline std::vector<std::filesystem::path> write_artifacts(const ScenarioReport& r,
                                                          const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& p, const std::string& text) {
    write_text(p, text);
    written.push_back(p);
  };
  if (r.thin) {
    std::ostringstream os;
    os << kThinFacingHeader << '\n'
       << csv::number(r.scenario.impact_velocity_mps) << ',' << csv::number(r.thin->ballistic_limit_mps) << ','
       << csv::number(r.thin->residual_velocity_mps) << ',' << csv::number(r.thin->residual_diameter_m) << ','
       << csv::number(r.thin->residual_mass_kg) << ',' << (r.thin->perforated ? 1 : 0) << '\n';
    emit(dir / "facing.csv", os.str());
  }
  if (r.jet && r.scenario.output.write_trace) {
    std::ostringstream tr, nt;
    jet::write_trace(tr, *r.jet);
    jet::write_normalized(nt, *r.jet);
    emit(dir / "facing.csv", tr.str());
    emit(dir / "facing_normalized.csv", nt.str());
  }
  if (r.backing) {
    std::ostringstream oc, hi;
    oc << fabric::kOutcomeHeader << '\n';
    fabric::write_outcome_row(oc, *r.backing);
    emit(dir / "backing.csv", oc.str());
    fabric::write_history(hi, *r.backing);
    emit(dir / "backing_history.csv", hi.str());
    if (r.scenario.output.write_snapshots) {
      fs::create_directories(dir / "snapshots");
      int i = 0;
      for (const auto& s : r.backing->snapshots) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%04d.txt", i++);
        std::ostringstream os;
        fabric::write_snapshot(os, s);
        emit(dir / "snapshots" / name, os.str());
      }
    }
  }
  emit(dir / "report.json", dump(to_json(r)));
  return written;
}

// ---------------------------------------------------------------------------
// Sweeps

inline constexpr const char* kSweepHeader =
    "point,V0_mps,Np,outcome,facing_P_m,facing_exit_V_mps,Vr_mps,Np_star,backing_P_m,Wc_J,error";

/// Final residual velocity of a scenario: zero when stopped anywhere.
inline double final_residual_velocity(const ScenarioReport& r) {
  if (r.backing) return r.backing->residual_velocity_mps;
  if (r.handoff) return r.handoff->velocity_mps;
  return 0.0;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

inline std::string sweep_csv(const std::vector<SweepPoint>& points, bool plies) {
  std::ostringstream os;
  os << kSweepHeader << '\n';
  int i = 0;
  for (const auto& p : points) {
    os << i++ << ',';
    if (!p.report) {
      os << (plies ? "" : csv::number(p.value)) << ',' << (plies ? std::to_string(int(p.value)) : "")
         << ",error,,,,,,," << quote(p.error) << '\n';
      continue;
    }
    const auto& r = *p.report;
    const int np = r.scenario.backing ? r.scenario.backing->ply_count : 0;
    const double facing_p = r.jet ? r.jet->final_state.depth_m : 0.0;
    os << csv::number(r.scenario.impact_velocity_mps) << ',' << np << ',' << to_string(r.outcome) << ','
       << csv::number(facing_p) << ',' << (r.handoff ? csv::number(r.handoff->velocity_mps) : "") << ','
       << csv::number(final_residual_velocity(r)) << ',' << (r.backing ? std::to_string(r.backing->perforated_plies) : "")
       << ',' << (r.backing ? csv::number(r.backing->depth_m) : "") << ','
       << (r.backing ? csv::number(r.backing->absorbed_energy_J) : "") << ",\n";
  }
  return os.str();
}

}  // namespace armorsim::report
