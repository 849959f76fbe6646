#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "armorsim/csv.hpp"
#include "armorsim/report.hpp"
#include "armorsim/scenarios.hpp"

using namespace armorsim;
namespace fs = std::filesystem;

namespace {

Scenario quick_pinned() {
  Scenario s = scenarios::pinned_handoff();
  s.backing = kevlar29(10);
  s.fabric.snapshot_interval_s = 2e-6;
  return s;
}

}  // namespace

TEST_CASE("thin facing below its ballistic limit stops the bullet") {
  Scenario s = scenarios::stopping_power("AK47");
  s.impact_velocity_mps = 200.0;
  const auto rep = run_scenario(s);
  CHECK(rep.outcome == Outcome::stopped_in_facing);
  CHECK_FALSE(rep.facing_perforated);
  CHECK_FALSE(rep.handoff);
  CHECK_FALSE(rep.backing);
  CHECK(report::final_residual_velocity(rep) == 0.0);
}

TEST_CASE("handoff overrides replace the computed exit state") {
  const Scenario s = quick_pinned();
  const auto rep = run_scenario(s);
  REQUIRE(rep.computed_handoff);
  REQUIRE(rep.handoff);
  CHECK(rep.handoff->velocity_mps == 567.0);
  CHECK(rep.handoff->mass_kg == 0.003);
  CHECK(rep.handoff->diameter_m == 0.0072);
  CHECK(rep.computed_handoff->velocity_mps == rep.thin->residual_velocity_mps);
  CHECK(rep.computed_handoff->velocity_mps != 567.0);

  Scenario partial = s;
  partial.handoff = {};
  partial.handoff.velocity_mps = 500.0;
  const auto p = run_facing(partial);
  CHECK(p.handoff->velocity_mps == 500.0);
  CHECK(p.handoff->mass_kg == p.computed_handoff->mass_kg);
  CHECK(p.handoff->diameter_m == p.computed_handoff->diameter_m);
}

TEST_CASE("the facing result does not depend on the backing") {
  Scenario a = scenarios::stopping_power("M16");
  Scenario b = a;
  b.backing = kevlar29(5);
  Scenario c = a;
  c.backing.reset();
  const auto ra = run_facing(a), rb = run_facing(b), rc = run_scenario(c);
  CHECK(ra.thin->residual_velocity_mps == rb.thin->residual_velocity_mps);
  CHECK(ra.thin->residual_velocity_mps == rc.thin->residual_velocity_mps);
  CHECK(rc.outcome == Outcome::facing_perforated);
  CHECK_FALSE(rc.backing);
}

TEST_CASE("a perforated facing feeds the backing with the handoff state") {
  const auto rep = run_scenario(quick_pinned());
  REQUIRE(rep.backing);
  CHECK(rep.backing->ply_count == 10);
  CHECK((rep.outcome == Outcome::perforated || rep.outcome == Outcome::stopped_in_backing));
  CHECK(rep.backing->absorbed_energy_J <=
        0.5 * 0.003 * 567.0 * 567.0 * (1 + 1e-12));
}

TEST_CASE("velocity sweep matches single runs and keeps order") {
  Scenario s = scenarios::rod();
  s.jet.dt = 2e-8;
  s.workers = 3;
  const std::vector<double> v{3000.0, 1000.0, 2000.0, 1500.0, 2500.0};
  const auto pts = velocity_sweep(s, v);
  REQUIRE(pts.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(pts[i].value == v[i]);
    REQUIRE(pts[i].report);
  }
  Scenario one = s;
  one.impact_velocity_mps = 2000.0;
  const auto single = run_scenario(one);
  CHECK(pts[2].report->jet->final_state.depth_m == single.jet->final_state.depth_m);

  auto depth = [&](double V) {
    for (const auto& p : pts)
      if (p.value == V) return p.report->jet->final_state.depth_m;
    return -1.0;
  };
  CHECK(depth(1000) < depth(1500));
  CHECK(depth(1500) < depth(2000));
  CHECK(depth(2000) < depth(2500));
  CHECK(depth(2500) < depth(3000));

  const auto dup = velocity_sweep(s, {1500.0, 1500.0});
  CHECK(report::dump(report::to_json(*dup[0].report)) == report::dump(report::to_json(*dup[1].report)));
  CHECK_THROWS_AS(velocity_sweep(s, {}), InvalidInput);
}

TEST_CASE("velocity sweep records failed points without aborting") {
  Scenario s = scenarios::rod();
  s.jet.dt = 2e-8;
  const auto pts = velocity_sweep(s, {1500.0, -5.0});
  REQUIRE(pts[0].report);
  CHECK_FALSE(pts[1].report);
  CHECK_FALSE(pts[1].error.empty());
}

TEST_CASE("ply sweep keeps the requested order and validates counts") {
  Scenario s = quick_pinned();
  s.workers = 2;
  const auto pts = ply_count_sweep(s, {6, 0, 3});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].value == 6);
  CHECK(pts[1].value == 0);
  CHECK(pts[2].value == 3);
  CHECK(pts[0].report->backing->ply_count == 6);
  CHECK(pts[1].report->backing->residual_velocity_mps == 567.0);
  CHECK(pts[0].report->thin->residual_velocity_mps == pts[2].report->thin->residual_velocity_mps);
  CHECK_THROWS_AS(ply_count_sweep(s, {}), InvalidInput);
  CHECK_THROWS_AS(ply_count_sweep(s, {-1}), InvalidInput);
  CHECK_THROWS_AS(ply_count_sweep(s, {201}), InvalidInput);
  Scenario bare = s;
  bare.backing.reset();
  CHECK_THROWS_AS(ply_count_sweep(bare, {1}), InvalidInput);
}

TEST_CASE("parallel map is independent of the worker count") {
  auto job = [](std::size_t i) { return double(i * i) + 0.5; };
  const auto a = parallel_map<double>(50, 1, job);
  const auto b = parallel_map<double>(50, 4, job);
  CHECK(a == b);
  CHECK(parallel_map<double>(0, 4, job).empty());
}

TEST_CASE("stage failures are labelled") {
  Scenario s = quick_pinned();
  s.fabric.dt_s = 1e-5;
  try {
    run_scenario(s);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "backing");
  }

  Scenario r = scenarios::rod();
  r.jet.max_steps = 3;
  try {
    run_scenario(r);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "facing");
  }

  Scenario bad = quick_pinned();
  bad.impact_velocity_mps = 0.0;
  CHECK_THROWS_AS(run_scenario(bad), InvalidInput);
}

TEST_CASE("report JSON and artifacts") {
  const Scenario s = quick_pinned();
  const auto rep = run_scenario(s);
  const auto j = report::to_json(rep);
  CHECK(j["report_version"] == 1);
  CHECK(j["scenario"]["name"] == s.name);
  CHECK(j["facing"]["kind"] == "thin");
  CHECK(j["handoff"]["overridden"] == true);
  CHECK(j["handoff"]["used"]["Vr_mps"] == 567.0);
  CHECK(j["backing"]["Np"] == 10);
  CHECK(j["outcome"] == to_string(rep.outcome));
  CHECK(j["checks"]["energy_balance_within_1pct"] == true);

  const fs::path dir = fs::temp_directory_path() / "armorsim_test_artifacts";
  fs::remove_all(dir);
  const auto files = report::write_artifacts(rep, dir);
  for (const char* f : {"report.json", "facing.csv", "backing.csv", "backing_history.csv"})
    CHECK(fs::exists(dir / f));
  CHECK(fs::is_directory(dir / "snapshots"));
  CHECK(std::size_t(std::distance(fs::directory_iterator(dir / "snapshots"), fs::directory_iterator())) ==
        rep.backing->snapshots.size());
  CHECK(files.back() == dir / "report.json");
  const auto facing = csv::read_file((dir / "facing.csv").string());
  REQUIRE(facing.rows.size() == 1);
  CHECK(csv::parse_number(facing.rows[0][2]) == rep.thin->residual_velocity_mps);
  fs::remove_all(dir);
}

TEST_CASE("thick facing report carries the trace and closure") {
  Scenario s = scenarios::rod();
  s.jet.dt = 2e-8;
  const auto rep = run_scenario(s);
  const auto j = report::to_json(rep);
  CHECK(j["facing"]["kind"] == "thick");
  CHECK(j["facing"]["exit"].is_null());
  CHECK(j["facing"]["first_closure"]["iterations"].get<int>() >= 1);
  CHECK(j["backing"].is_null());
  CHECK(j["checks"]["jet_max_residual_le_1e-9"] == true);
}

TEST_CASE("sweep CSV quotes error text so it survives a reader") {
  std::vector<SweepPoint> pts(2);
  pts[0].value = 3;
  pts[0].error = "backing: step \"too large\", 1e-5 > 2e-9\nretry";
  Scenario s = quick_pinned();
  pts[1].value = 0;
  pts[1].report = ply_count_sweep(s, {0}).front().report;
  const std::string text = report::sweep_csv(pts, true);
  std::istringstream in(text);
  const auto t = csv::read(in);
  REQUIRE(t.rows.size() == 2);
  REQUIRE(t.rows[0].size() == t.header.size());
  CHECK(t.rows[0][3] == "error");
  CHECK(t.rows[0].back() == "backing: step \"too large\", 1e-5 > 2e-9 retry");
  CHECK(t.rows[1][3] == "perforated");
  CHECK(csv::parse_number(t.rows[1][6]) == 567.0);
}
