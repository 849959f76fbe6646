#pragma once

// Facing stage (thin plate or thick jet-model facing) followed by the fabric
// backing, seeded with the projectile state at facing exit.

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "armorsim/error.hpp"
#include "armorsim/fabric_backing.hpp"
#include "armorsim/jet_model.hpp"
#include "armorsim/materials.hpp"
#include "armorsim/thin_facing.hpp"

namespace armorsim {

struct ThinFacingStage {
  ThinFacingSpec spec;
  double mass_retention = 1.0;
};

struct ThickFacingStage {
  ThickFacingSpec spec;
};

using FacingStage = std::variant<ThinFacingStage, ThickFacingStage>;

/// Projectile state at facing exit.
struct HandoffState {
  double velocity_mps = 0.0;
  double mass_kg = 0.0;
  double diameter_m = 0.0;
};

struct HandoffOverride {
  std::optional<double> velocity_mps, mass_kg, diameter_m;
  bool any() const { return velocity_mps || mass_kg || diameter_m; }
};

struct OutputSettings {
  bool write_trace = true;
  bool write_snapshots = true;
};

struct Scenario {
  std::string name = "scenario";
  ProjectileSpec projectile;
  FacingStage facing;
  std::optional<FabricSpec> backing;
  double impact_velocity_mps = 0.0;
  HandoffOverride handoff;
  jet::IntegrationSettings jet;
  fabric::RunSettings fabric;
  OutputSettings output;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const {
    projectile.validate();
    if (!(impact_velocity_mps > 0.0)) throw InvalidInput("impact velocity must be positive");
    if (const auto* t = std::get_if<ThinFacingStage>(&facing)) {
      if (!(t->spec.thickness_m > 0.0) || !(t->spec.brinell > 0.0))
        throw InvalidInput("thin facing thickness and hardness must be positive");
      if (!(t->mass_retention > 0.0) || t->mass_retention > 1.6)
        throw InvalidInput("mass retention must lie in (0, 1.6]");
    } else {
      std::get<ThickFacingStage>(facing).spec.validate();
    }
    if (backing && backing->ply_count > 0) backing->validate();
    if (!(jet.dt > 0.0)) throw InvalidInput("jet time step must be positive");
    if (handoff.velocity_mps && *handoff.velocity_mps < 0.0) throw InvalidInput("handoff velocity must be >= 0");
    if (handoff.mass_kg && !(*handoff.mass_kg > 0.0)) throw InvalidInput("handoff mass must be positive");
    if (handoff.diameter_m && !(*handoff.diameter_m > 0.0)) throw InvalidInput("handoff diameter must be positive");
  }
};

enum class Outcome { stopped_in_facing, facing_perforated, stopped_in_backing, perforated, inconclusive };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::stopped_in_facing: return "stopped_in_facing";
    case Outcome::facing_perforated: return "facing_perforated";
    case Outcome::stopped_in_backing: return "stopped_in_backing";
    case Outcome::perforated: return "perforated";
    case Outcome::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ScenarioReport {
  Scenario scenario;
  std::optional<thin::PerforationResult> thin;
  std::optional<jet::JetRun> jet;
  bool facing_perforated = false;
  std::optional<HandoffState> computed_handoff;
  std::optional<HandoffState> handoff;  // after overrides; what the backing saw
  std::optional<fabric::BackingOutcome> backing;
  Outcome outcome = Outcome::inconclusive;
};

/// Facing stage only.
inline ScenarioReport run_facing(const Scenario& s) {
  ScenarioReport rep;
  rep.scenario = s;
  try {
    if (const auto* t = std::get_if<ThinFacingStage>(&s.facing)) {
      rep.thin = thin::perforate_thin(s.projectile, t->spec, s.impact_velocity_mps, t->mass_retention);
      rep.facing_perforated = rep.thin->perforated;
      if (rep.facing_perforated)
        rep.computed_handoff = HandoffState{rep.thin->residual_velocity_mps, rep.thin->residual_mass_kg,
                                            rep.thin->residual_diameter_m};
    } else {
      const auto& f = std::get<ThickFacingStage>(s.facing);
      rep.jet = jet::integrate(jet::JetProblem{s.projectile, f.spec}, s.impact_velocity_mps, s.jet);
      if (rep.jet->exit) {
        rep.facing_perforated = true;
        rep.computed_handoff =
            HandoffState{rep.jet->exit->velocity_mps, rep.jet->exit->mass_kg, rep.jet->exit->diameter_m};
      }
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("facing", e.what());
  }
  if (rep.facing_perforated) {
    HandoffState h = *rep.computed_handoff;
    if (s.handoff.velocity_mps) h.velocity_mps = *s.handoff.velocity_mps;
    if (s.handoff.mass_kg) h.mass_kg = *s.handoff.mass_kg;
    if (s.handoff.diameter_m) h.diameter_m = *s.handoff.diameter_m;
    rep.handoff = h;
  }
  rep.outcome = rep.facing_perforated ? Outcome::facing_perforated : Outcome::stopped_in_facing;
  return rep;
}

inline ScenarioReport run_scenario(const Scenario& s) {
  s.validate();
  ScenarioReport rep = run_facing(s);
  if (!rep.facing_perforated || !s.backing) return rep;
  const auto& h = *rep.handoff;
  try {
    fabric::RunSettings set = s.fabric;
    if (!s.output.write_snapshots) set.snapshot_interval_s = 0.0;
    rep.backing = fabric::run_backing(*s.backing, {h.mass_kg, h.diameter_m, h.velocity_mps}, set);
  } catch (const Error& e) {
    throw StageError("backing", e.what());
  }
  switch (rep.backing->status) {
    case fabric::Status::stopped: rep.outcome = Outcome::stopped_in_backing; break;
    case fabric::Status::perforated: rep.outcome = Outcome::perforated; break;
    case fabric::Status::inconclusive: rep.outcome = Outcome::inconclusive; break;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1, int(std::thread::hardware_concurrency()));
}

/// Evaluates `job(i)` for i in [0, n) on `workers` threads. Results land at
/// their index, so the output order does not depend on scheduling.
template <class Result, class Job>
std::vector<Result> parallel_map(std::size_t n, int workers, Job job) {
  std::vector<Result> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) out[i] = job(i);
  };
  const int w = std::min<int>(resolve_workers(workers), int(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < w; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

struct SweepPoint {
  double value = 0.0;  // V_0 or ply count
  std::optional<ScenarioReport> report;
  std::string error;
};

inline std::vector<SweepPoint> velocity_sweep(const Scenario& base, const std::vector<double>& velocities) {
  if (velocities.empty()) throw InvalidInput("velocity sweep needs at least one velocity");
  return parallel_map<SweepPoint>(velocities.size(), base.workers, [&](std::size_t i) {
    SweepPoint p;
    p.value = velocities[i];
    Scenario s = base;
    s.impact_velocity_mps = velocities[i];
    try {
      p.report = run_scenario(s);
    } catch (const Error& e) {
      p.error = e.what();
    }
    return p;
  });
}

/// Backing ply-count sweep; the facing stage is run once and shared.
inline std::vector<SweepPoint> ply_count_sweep(const Scenario& base, const std::vector<int>& plies) {
  if (plies.empty()) throw InvalidInput("ply sweep needs at least one ply count");
  if (!base.backing) throw InvalidInput("ply sweep needs a backing");
  for (int n : plies)
    if (n < 0 || n > 200) throw InvalidInput("ply count " + std::to_string(n) + " outside [0, 200]");
  base.validate();
  const ScenarioReport facing = run_facing(base);
  return parallel_map<SweepPoint>(plies.size(), base.workers, [&](std::size_t i) {
    SweepPoint p;
    p.value = plies[i];
    ScenarioReport rep = facing;
    rep.scenario.backing = base.backing->with_plies(plies[i]);
    if (rep.facing_perforated) {
      const auto& h = *rep.handoff;
      try {
        fabric::RunSettings set = base.fabric;
        set.snapshot_interval_s = 0.0;
        rep.backing =
            fabric::run_backing(*rep.scenario.backing, {h.mass_kg, h.diameter_m, h.velocity_mps}, set);
        rep.outcome = rep.backing->status == fabric::Status::stopped      ? Outcome::stopped_in_backing
                      : rep.backing->status == fabric::Status::perforated ? Outcome::perforated
                                                                          : Outcome::inconclusive;
      } catch (const Error& e) {
        p.error = std::string("backing: ") + e.what();
        return p;
      }
    }
    p.report = std::move(rep);
    return p;
  });
}

}  // namespace armorsim
