#pragma once

// Built-in acceptance checks. Each check reports what it measured next to the
// tolerance it was held to; a failing check is a report entry, not an error.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "armorsim/csv.hpp"
#include "armorsim/jet_model.hpp"
#include "armorsim/pipeline.hpp"
#include "armorsim/report.hpp"
#include "armorsim/scenarios.hpp"
#include "armorsim/thin_facing.hpp"

namespace armorsim::validation {

using ojson = nlohmann::ordered_json;

struct CheckResult {
  int criterion = 0;
  std::string id;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string tolerance;
  ojson detail = ojson::object();
};

struct Options {
  std::vector<std::string> only;  // check ids; empty runs everything
  int workers = 0;
  double table1_factor = 2.47e7;  // perforation factor used by the shot-table check
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

/// Frozen regressions. Values were produced by this implementation and pin it
/// against silent drift.
namespace golden {
// Final P / L_0 for the semi-infinite runs at 1500 m/s.
inline constexpr double kP1T1_1500 = 0.2836890014753526;
inline constexpr double kP1T3_1500 = 0.4920139503237048;
inline constexpr double kRelTol = 1e-6;
// Ceramic-over-FGM exit velocity gain and FGM-over-ceramic diameter gain, in percent.
inline constexpr double kVelocityGapTarget = 17.0;
inline constexpr double kDiameterGapTarget = 15.0;
inline constexpr double kSoftBand = 10.0;
inline constexpr int kTraumaTarget = 15;
}  // namespace golden

namespace detail {

inline std::string fmt(double v, int prec = 6) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*g", prec, v);
  return b;
}

inline double rel_dev(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. Thin-plate residual velocities

inline CheckResult check_table1(double factor = 2.47e7) {
  CheckResult c{1, "table1", "M-16 thin-plate residual velocities within 2%", false, {}, {}};
  ProjectileSpec p = catalog_projectile("M16");
  p.perforation_factor = factor;
  const auto shots = thin::m16_shot_series();
  const auto published = thin::m16_published_calculated();
  double worst = 0.0;
  int within = 0;
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const auto& s = shots[i];
    const auto r = thin::perforate_thin(p, ThinFacingSpec{s.thickness_m, s.brinell}, s.impact_velocity_mps);
    const double dev = (r.residual_velocity_mps - published[i]) / published[i];
    worst = std::max(worst, std::abs(dev));
    if (std::abs(dev) <= 0.02) ++within;
    rows.push_back({{"series", i + 1}, {"Vrc_mps", r.residual_velocity_mps}, {"published_mps", published[i]},
                    {"deviation", dev}});
  }
  c.passed = within == int(shots.size());
  c.measured = std::to_string(within) + "/" + std::to_string(shots.size()) + " rows, worst " +
               detail::fmt(100 * worst, 3) + "%";
  c.tolerance = "|dev| <= 2% per row";
  c.detail = {{"factor", factor}, {"rows", rows}};
  return c;
}

// ---------------------------------------------------------------------------
// 2. Fit recovery

inline CheckResult check_fit() {
  CheckResult c{2, "fit", "Perforation factor fit on the M-16 shot series", false, {}, {}};
  const auto fit = thin::fit_factor(thin::m16_shot_series(), catalog_projectile("M16"));
  double lo = 1e300, hi = -1e300;
  for (const auto& r : fit.rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  c.passed = fit.factor >= 2.3e7 && fit.factor <= 2.6e7 && lo >= 0.90 && hi <= 1.10;
  c.measured = "f=" + detail::fmt(fit.factor, 5) + ", ratios [" + detail::fmt(lo, 4) + ", " + detail::fmt(hi, 4) + "]";
  c.tolerance = "f in [2.3e7, 2.6e7], ratios in [0.90, 1.10]";
  c.detail = {{"factor", fit.factor}, {"ratio_min", lo}, {"ratio_max", hi}};
  return c;
}

// ---------------------------------------------------------------------------
// 3. Jet-model residuals

inline CheckResult check_jet_residuals(int workers = 0) {
  CheckResult c{3, "jet_residuals", "Jet closure residuals on the rod/target grid", false, {}, {}};
  struct Case {
    std::string p, t;
    double V;
  };
  std::vector<Case> cases;
  for (const char* p : {"p1", "p2"})
    for (const char* t : {"t1", "t2", "t3"})
      for (double V : {1000.0, 1200.0, 1500.0, 1800.0, 2100.0, 2400.0, 3000.0}) cases.push_back({p, t, V});

  struct Outcome {
    double residual = 0.0;
    int iterations = 0;
    double final_P = 0.0;
    std::string reason, error;
  };
  const auto runs = parallel_map<Outcome>(cases.size(), workers, [&](std::size_t i) {
    Outcome o;
    try {
      const jet::JetProblem prob{catalog_projectile(cases[i].p), catalog_facing(cases[i].t)};
      const auto run = jet::integrate(prob, cases[i].V);
      o.residual = run.max_residual;
      o.iterations = run.max_iterations;
      o.final_P = run.final_state.depth_m / run.initial_length;
      o.reason = std::string(jet::to_string(run.reason));
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    return o;
  });

  double worst = 0.0;
  int max_it = 0, errors = 0;
  double p1t1 = NAN, p1t3 = NAN;
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& o = runs[i];
    worst = std::max(worst, o.residual);
    max_it = std::max(max_it, o.iterations);
    if (!o.error.empty()) ++errors;
    if (cases[i].p == "p1" && cases[i].V == 1500.0) {
      if (cases[i].t == "t1") p1t1 = o.final_P;
      if (cases[i].t == "t3") p1t3 = o.final_P;
    }
    rows.push_back({{"projectile", cases[i].p}, {"target", cases[i].t}, {"V0_mps", cases[i].V},
                    {"max_residual", o.residual}, {"max_iterations", o.iterations}, {"P_over_L0", o.final_P},
                    {"stop", o.reason}, {"error", o.error}});
  }
  const bool golden_ok = detail::rel_dev(p1t1, golden::kP1T1_1500) <= golden::kRelTol &&
                         detail::rel_dev(p1t3, golden::kP1T3_1500) <= golden::kRelTol;
  c.passed = errors == 0 && worst <= 1e-9 && max_it <= 100 && golden_ok;
  c.measured = std::to_string(cases.size() - errors) + "/" + std::to_string(cases.size()) +
               " runs, max residual " + detail::fmt(worst, 3) + ", max iterations " + std::to_string(max_it) +
               ", golden P/L0 " + detail::fmt(p1t1, 10) + " / " + detail::fmt(p1t3, 10);
  c.tolerance = "residual <= 1e-9, iterations <= 100, golden rel. dev <= 1e-6";
  c.detail = {{"golden_p1_t1_1500", golden::kP1T1_1500}, {"golden_p1_t3_1500", golden::kP1T3_1500},
              {"runs", rows}};
  return c;
}

// ---------------------------------------------------------------------------
// 4. Asymptotics

inline CheckResult check_asymptotics() {
  CheckResult c{4, "asymptotics", "Early-time interface speeds, p1 into t3", false, {}, {}};
  const jet::JetProblem prob{catalog_projectile("p1"), catalog_facing("t3")};
  const auto slow = jet::converge_step(1000.0, 0.0, prob);
  const auto fast = jet::converge_step(5000.0, 0.0, prob);
  const double ratio = slow.interface.erosion / slow.interface.penetration;
  const double dt = detail::rel_dev(fast.interface.penetration, 2500.0);
  const double dp = detail::rel_dev(fast.interface.erosion, 2500.0);
  const bool slow_ok = std::abs(ratio - 2.0) <= 0.4;
  const bool fast_ok = dt <= 0.10 && dp <= 0.10;
  c.passed = slow_ok && fast_ok;
  c.measured = "V=1000: Vp/Vt=" + detail::fmt(ratio, 4) + "; V=5000: Vt=" +
               detail::fmt(fast.interface.penetration, 5) + ", Vp=" + detail::fmt(fast.interface.erosion, 5);
  c.tolerance = "Vp/Vt = 2.0 +- 0.4 at 1000 m/s; both within 10% of V/2 at 5000 m/s";
  c.detail = {{"low_velocity_ratio", ratio},
              {"low_velocity_pass", slow_ok},
              {"high_velocity_Vt_dev", dt},
              {"high_velocity_Vp_dev", dp},
              {"high_velocity_pass", fast_ok}};
  return c;
}

// ---------------------------------------------------------------------------
// 5. Quadrature oracle

inline CheckResult check_quadrature() {
  CheckResult c{5, "quadrature", "Plastic-work integral at lambda = lambda_z = 1", false, {}, {}};
  const double yield = 500e6;
  const double got = yield * jet::plastic_work_ratio(1.0, 1.0);
  const double want = yield * 2.0 * std::log(2.0) / std::sqrt(3.0);
  const double dev = detail::rel_dev(got, want);
  c.passed = dev <= 1e-8;
  c.measured = "rel. dev " + detail::fmt(dev, 3);
  c.tolerance = "<= 1e-8";
  c.detail = {{"value_Pa", got}, {"exact_Pa", want}};
  return c;
}

// ---------------------------------------------------------------------------
// 6. Ceramic vs FGM facing

inline CheckResult check_fgm() {
  CheckResult c{6, "fgm", "Ceramic vs FGM facing exit state", false, {}, {}};
  std::optional<HandoffState> cer, fgm;
  std::string err;
  try {
    cer = run_facing(scenarios::graded_facing("ceramic_ref")).computed_handoff;
    fgm = run_facing(scenarios::graded_facing("fgm_ref")).computed_handoff;
  } catch (const std::exception& e) {
    err = e.what();
  }
  if (!cer || !fgm) {
    c.measured = err.empty() ? "facing not breached" : err;
    c.tolerance = "both facings breached";
    return c;
  }
  const double v_gap = 100.0 * (cer->velocity_mps - fgm->velocity_mps) / fgm->velocity_mps;
  const double d_gap = 100.0 * (fgm->diameter_m - cer->diameter_m) / cer->diameter_m;
  const bool v_ok = cer->velocity_mps > fgm->velocity_mps;
  const bool d_ok = fgm->diameter_m > cer->diameter_m;
  c.passed = v_ok && d_ok;
  c.measured = "V ceramic/FGM " + detail::fmt(cer->velocity_mps, 5) + "/" + detail::fmt(fgm->velocity_mps, 5) +
               " (gap " + detail::fmt(v_gap, 3) + "%), d ceramic/FGM " + detail::fmt(1e3 * cer->diameter_m, 5) +
               "/" + detail::fmt(1e3 * fgm->diameter_m, 5) + " mm (gap " + detail::fmt(d_gap, 3) + "%)";
  c.tolerance = "V_ceramic > V_FGM and d_FGM > d_ceramic";
  c.detail = {
      {"ceramic", report::detail::handoff_json(*cer)},
      {"fgm", report::detail::handoff_json(*fgm)},
      {"velocity_gap_pct", v_gap},
      {"diameter_gap_pct", d_gap},
      {"velocity_gap_soft_pass", std::abs(v_gap - golden::kVelocityGapTarget) <= golden::kSoftBand},
      {"diameter_gap_soft_pass", std::abs(d_gap - golden::kDiameterGapTarget) <= golden::kSoftBand},
  };
  return c;
}

// ---------------------------------------------------------------------------
// 7. Fabric properties

inline CheckResult check_fabric(int workers = 0) {
  CheckResult c{7, "fabric", "Fabric backing energy, monotonicity, stopping and mesh convergence", false, {}, {}};
  ojson d = ojson::object();
  std::vector<std::string> failures;

  // Energy balance over the pinned-handoff 40-ply run, and mesh doubling.
  const Scenario base = scenarios::pinned_handoff();
  double energy_err = NAN, mesh_change = NAN;
  try {
    Scenario fine = base;
    fine.fabric.mesh.radial_cells *= 2;
    const auto runs = parallel_map<ScenarioReport>(2, workers, [&](std::size_t i) {
      Scenario s = i == 0 ? base : fine;
      s.output.write_snapshots = false;
      return run_scenario(s);
    });
    const auto& coarse_b = *runs[0].backing;
    const auto& fine_b = *runs[1].backing;
    energy_err = coarse_b.max_energy_error;
    const double scale = std::max(coarse_b.residual_velocity_mps, 1e-9 * runs[0].handoff->velocity_mps);
    mesh_change = std::abs(fine_b.residual_velocity_mps - coarse_b.residual_velocity_mps) /
                  (coarse_b.residual_velocity_mps > 0 ? scale : runs[0].handoff->velocity_mps);
    d["energy_run"] = {{"status", fabric::to_string(coarse_b.status)},
                       {"max_energy_error", energy_err},
                       {"Vr_mps", coarse_b.residual_velocity_mps},
                       {"Np_star", coarse_b.perforated_plies}};
    d["mesh_doubling"] = {{"cells", base.fabric.mesh.radial_cells},
                          {"Vr_mps", coarse_b.residual_velocity_mps},
                          {"cells_fine", fine.fabric.mesh.radial_cells},
                          {"Vr_fine_mps", fine_b.residual_velocity_mps},
                          {"relative_change", mesh_change}};
  } catch (const std::exception& e) {
    failures.push_back(std::string("energy/mesh run: ") + e.what());
  }
  if (!(energy_err <= 0.01)) failures.push_back("energy balance");
  if (!(mesh_change < 0.03)) failures.push_back("mesh doubling");

  // Ply sweeps 0..100 step 5 for both stopping-power scenarios.
  std::vector<int> plies;
  for (int n = 0; n <= 100; n += 5) plies.push_back(n);
  bool monotone = true, stops = true;
  d["sweeps"] = ojson::array();
  for (const char* bullet : {"M16", "AK47"}) {
    Scenario s = scenarios::stopping_power(bullet);
    s.workers = workers;
    ojson sweep = {{"scenario", s.name}};
    std::vector<SweepPoint> pts;
    try {
      pts = ply_count_sweep(s, plies);
    } catch (const std::exception& e) {
      failures.push_back(std::string(bullet) + " sweep: " + e.what());
      monotone = stops = false;
      continue;
    }
    ojson vr = ojson::array();
    std::optional<int> first_stop;
    double prev = INFINITY, v_in = 0.0;
    bool this_monotone = true;
    for (const auto& p : pts) {
      if (!p.report) {
        vr.push_back(nullptr);
        this_monotone = false;
        continue;
      }
      if (p.report->handoff) v_in = p.report->handoff->velocity_mps;
      const double v = report::final_residual_velocity(*p.report);
      vr.push_back(v);
      // Noise allowance: 1% of the backing entry velocity.
      if (v > prev + 0.01 * v_in) this_monotone = false;
      prev = std::min(prev, v);
      if (!first_stop && p.report->outcome == Outcome::stopped_in_backing) first_stop = int(p.value);
    }
    monotone = monotone && this_monotone;
    stops = stops && first_stop.has_value();
    sweep["plies"] = plies;
    sweep["Vr_mps"] = vr;
    sweep["nonincreasing"] = this_monotone;
    sweep["first_stopping_plies"] = first_stop ? ojson(*first_stop) : ojson(nullptr);
    d["sweeps"].push_back(sweep);
  }
  if (!monotone) failures.push_back("V_r(N_p) monotonicity");
  if (!stops) failures.push_back("stopping N_p <= 100");

  c.passed = failures.empty();
  c.measured = "energy err " + detail::fmt(100 * energy_err, 3) + "%, mesh change " +
               detail::fmt(100 * mesh_change, 3) + "%, nonincreasing " + (monotone ? "yes" : "no") +
               ", stopping N_p found " + (stops ? "yes" : "no");
  if (!failures.empty()) {
    c.measured += "; failed:";
    for (const auto& f : failures) c.measured += " [" + f + "]";
  }
  c.tolerance = "energy <= 1%, V_r nonincreasing (1% noise), stop at N_p <= 100, mesh change < 3%";
  c.detail = d;
  return c;
}

// ---------------------------------------------------------------------------
// 8. Trauma behind ceramic and FGM facings

inline CheckResult check_trauma(int workers = 0) {
  CheckResult c{8, "trauma", "Equal trauma behind ceramic and FGM facings", false, {}, {}};
  const std::vector<std::string> facings{"ceramic_ref", "fgm_ref"};
  struct Run {
    std::optional<ScenarioReport> rep;
    std::string error;
  };
  const auto runs = parallel_map<Run>(2, workers, [&](std::size_t i) {
    Run r;
    try {
      Scenario s = scenarios::graded_facing(facings[i]);
      s.output.write_snapshots = false;
      r.rep = run_scenario(s);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  });
  for (const auto& r : runs)
    if (!r.rep || !r.rep->backing) {
      c.measured = r.error.empty() ? "backing not reached" : r.error;
      c.tolerance = "both runs reach the backing";
      return c;
    }
  const auto& a = *runs[0].rep->backing;
  const auto& b = *runs[1].rep->backing;
  c.passed = a.perforated_plies == b.perforated_plies;
  c.measured = "N_p* ceramic " + std::to_string(a.perforated_plies) + " (" + fabric::to_string(a.status) +
               "), FGM " + std::to_string(b.perforated_plies) + " (" + fabric::to_string(b.status) + ")";
  c.tolerance = "equal N_p*";
  c.detail = {{"ceramic", {{"status", fabric::to_string(a.status)},
                           {"Np_star", a.perforated_plies},
                           {"depth_m", a.depth_m},
                           {"Vr_mps", a.residual_velocity_mps}}},
              {"fgm", {{"status", fabric::to_string(b.status)},
                       {"Np_star", b.perforated_plies},
                       {"depth_m", b.depth_m},
                       {"Vr_mps", b.residual_velocity_mps}}},
              {"soft_target_Np_star", golden::kTraumaTarget},
              {"soft_pass", a.perforated_plies == golden::kTraumaTarget && b.perforated_plies == golden::kTraumaTarget},
              {"ceramic_depth_ge_fgm", a.depth_m >= b.depth_m}};
  return c;
}

// ---------------------------------------------------------------------------
// 9. Determinism

inline CheckResult check_determinism() {
  CheckResult c{9, "determinism", "Repeated runs give byte-identical reports", false, {}, {}};
  ojson d = ojson::array();
  bool all = true;
  auto twice = [&](const std::string& label, const std::function<std::string()>& fn) {
    std::string a, b;
    try {
      a = fn();
      b = fn();
    } catch (const std::exception& e) {
      a = std::string("error: ") + e.what();
      b = a + "(second)";
    }
    const bool same = a == b;
    all = all && same;
    d.push_back({{"run", label}, {"bytes", a.size()}, {"identical", same}});
  };
  twice("pinned-handoff report", [] { return report::dump(report::to_json(run_scenario(scenarios::pinned_handoff()))); });
  twice("p1/t3 report", [] { return report::dump(report::to_json(run_scenario(scenarios::rod()))); });
  // Row order must not depend on how many workers ran the sweep.
  Scenario sweep = scenarios::pinned_handoff();
  const std::vector<int> plies{0, 2, 4, 6};
  auto sweep_with = [&](int w) {
    Scenario s = sweep;
    s.workers = w;
    return report::sweep_csv(ply_count_sweep(s, plies), true);
  };
  const std::string one = sweep_with(1), three = sweep_with(3);
  all = all && one == three;
  d.push_back({{"run", "ply sweep, 1 vs 3 workers"}, {"bytes", one.size()}, {"identical", one == three}});
  c.passed = all;
  c.measured = all ? "all identical" : "mismatch";
  c.tolerance = "byte-identical";
  c.detail = {{"comparisons", d}};
  return c;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids{"table1", "fit",    "jet_residuals", "asymptotics", "quadrature",
                                            "fgm",    "fabric", "trauma",        "determinism"};
  return ids;
}

inline SuiteReport validation_suite(const Options& opt = {}) {
  for (const auto& id : opt.only)
    if (std::find(check_ids().begin(), check_ids().end(), id) == check_ids().end()) {
      std::string msg = "unknown check '" + id + "'; available:";
      for (const auto& k : check_ids()) msg += " " + k;
      throw UnknownName(msg);
    }
  auto wanted = [&](const std::string& id) {
    return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end();
  };
  SuiteReport r;
  if (wanted("table1")) r.checks.push_back(check_table1(opt.table1_factor));
  if (wanted("fit")) r.checks.push_back(check_fit());
  if (wanted("jet_residuals")) r.checks.push_back(check_jet_residuals(opt.workers));
  if (wanted("asymptotics")) r.checks.push_back(check_asymptotics());
  if (wanted("quadrature")) r.checks.push_back(check_quadrature());
  if (wanted("fgm")) r.checks.push_back(check_fgm());
  if (wanted("fabric")) r.checks.push_back(check_fabric(opt.workers));
  if (wanted("trauma")) r.checks.push_back(check_trauma(opt.workers));
  if (wanted("determinism")) r.checks.push_back(check_determinism());
  return r;
}

inline ojson to_json(const SuiteReport& r) {
  ojson checks = ojson::array();
  for (const auto& c : r.checks)
    checks.push_back({{"criterion", c.criterion},
                      {"id", c.id},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  return {{"passed", r.passed()}, {"checks", checks}};
}

/// One line per check: "PASS [n] id: name | measured | tolerance".
inline std::string format_line(const CheckResult& c) {
  return std::string(c.passed ? "PASS" : "FAIL") + " [" + std::to_string(c.criterion) + "] " + c.id + ": " +
         c.name + " | " + c.measured + " | " + c.tolerance;
}

}  // namespace armorsim::validation
