#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "armorsim/csv.hpp"
#include "armorsim/fabric_backing.hpp"

using namespace armorsim;
using namespace armorsim::fabric;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FabricSpec unbreakable(int plies) {
  FabricSpec f = kevlar29(plies);
  f.ply_tensile_limit_Pa = kInfinity;
  f.adhesive_normal_limit_Pa = kInfinity;
  f.adhesive_shear_limit_Pa = kInfinity;
  return f;
}

// Linear axisymmetric membrane under uniform tension T driven by a rigid
// punch of radius a and mass M: mu w_tt = T (w_rr + w_r / r) on (a, R),
// w(R) = 0, M dV/dt = 2 pi a T w_r(a). Conservative finite volumes on a
// grid of its own, leapfrog in time.
struct MembraneOracle {
  double mu, T, a, R, M;
  int cells;

  std::vector<std::pair<double, double>> velocity_history(double V0, double t_end, double sample) const {
    const double h = (R - a) / cells;
    const double c = std::sqrt(T / mu);
    const double dt = 0.4 * h / c;
    std::vector<double> w(cells + 1, 0.0), v(cells + 1, 0.0), f(cells + 1, 0.0);
    auto r = [&](double i) { return a + i * h; };
    auto forces = [&] {
      std::fill(f.begin(), f.end(), 0.0);
      for (int i = 0; i < cells; ++i) {
        const double flux = 2 * kPi * T * r(i + 0.5) * (w[i + 1] - w[i]) / h;
        f[i] += flux;
        f[i + 1] -= flux;
      }
    };
    auto mass = [&](int i) { return i == 0 ? M : mu * 2 * kPi * r(i) * h; };
    v[0] = V0;
    forces();
    std::vector<std::pair<double, double>> out{{0.0, V0}};
    double t = 0.0, next = sample;
    while (t < t_end) {
      for (int i = 0; i < cells; ++i) v[i] += 0.5 * dt * f[i] / mass(i);
      for (int i = 0; i < cells; ++i) w[i] += dt * v[i];
      forces();
      for (int i = 0; i < cells; ++i) v[i] += 0.5 * dt * f[i] / mass(i);
      t += dt;
      if (t >= next) {
        out.emplace_back(t, v[0]);
        next += sample;
      }
    }
    return out;
  }
};

}  // namespace

TEST_CASE("single prestrained ply matches the linear membrane oracle at small amplitude") {
  FabricSpec f = unbreakable(1);
  f.areal_density_kgm2 = 0.485;
  f.prestrain = 1e-3;
  const double V0 = 0.1, mass = 1e-3, d = 7.35e-3;
  MeshSettings mesh{0.15, 2000};
  State s(f, {mass, d, V0}, mesh);
  const double dt = 0.5 * s.stable_dt();

  // The punch edge is the outermost node carried by the impactor.
  const double a = (s.slaved_nodes() - 1) * s.dr();
  const double T = 70e9 * f.prestrain * f.ply_thickness_m();
  const MembraneOracle oracle{f.ply_areal_density(), T, a, 0.15, s.body_mass(), 4000};
  const double t_end = 30e-6;
  const auto ref = oracle.velocity_history(s.velocity(), t_end, 5e-6);

  std::size_t next = 1;
  while (next < ref.size() && s.time() < 2 * t_end) {
    s.step(dt);
    if (s.time() >= ref[next].first) {
      const double drop_lib = ref[0].second - s.velocity();
      const double drop_ref = ref[0].second - ref[next].second;
      INFO("t=" << s.time() << " drop lib=" << drop_lib << " oracle=" << drop_ref);
      CHECK_THAT(drop_lib, WithinRel(drop_ref, 0.03));
      ++next;
    }
  }
  CHECK(next == ref.size());
  // The signal is not trivially small.
  CHECK(ref.back().second < 0.95 * ref[0].second);
}

TEST_CASE("energy is conserved without failure") {
  State s(unbreakable(5), {3e-3, 7.2e-3, 300.0}, {});
  const double dt = 0.25 * s.stable_dt();
  double worst = 0.0;
  for (int i = 0; i < 3000; ++i) {
    s.step(dt);
    worst = std::max(worst, s.energy().relative_error());
  }
  CHECK(s.broken_segments() == 0);
  CHECK(s.failed_links() == 0);
  CHECK(worst < 1e-3);
}

TEST_CASE("energy balance holds through failure within 1%") {
  RunSettings set;
  set.history_interval_s = 0.2e-6;
  const auto out = run_backing(kevlar29(40), {3e-3, 7.2e-3, 567.0}, set);
  CHECK(out.max_energy_error < 0.01);
  for (const auto& h : out.history) CHECK(h.energy.relative_error() < 0.01);
  CHECK(out.broken_segments > 0);
}

TEST_CASE("an impactor at rest leaves the package undisturbed") {
  State s(kevlar29(10), {3e-3, 7.2e-3, 0.0}, {});
  const double dt = s.stable_dt();
  for (int i = 0; i < 200; ++i) s.step(dt);
  for (int k = 0; k < s.plies(); ++k)
    for (int j = 0; j < s.nodes(); ++j) REQUIRE(s.w(k, j) == 0.0);
  CHECK(s.velocity() == 0.0);
  const auto out = run_backing(kevlar29(10), {3e-3, 7.2e-3, 0.0});
  CHECK(out.status == Status::stopped);
  CHECK(out.perforated_plies == 0);
}

TEST_CASE("infinite limits never fail and the impactor is eventually stopped") {
  RunSettings set;
  set.mesh.outer_radius_m = 0.3;
  const auto out = run_backing(unbreakable(10), {3e-3, 7.2e-3, 200.0}, set);
  CHECK(out.broken_segments == 0);
  CHECK(out.failed_links == 0);
  CHECK(out.status == Status::stopped);
  CHECK(out.perforated_plies == 0);
  CHECK(out.residual_velocity_mps == 0.0);
  CHECK_THAT(out.absorbed_energy_J, WithinRel(0.5 * 3e-3 * 200.0 * 200.0, 1e-12));
}

TEST_CASE("damage is irreversible") {
  RunSettings set;
  set.snapshot_interval_s = 0.5e-6;
  set.history_interval_s = 0.25e-6;
  const auto out = run_backing(kevlar29(20), {3e-3, 7.2e-3, 567.0}, set);
  REQUIRE(out.snapshots.size() > 2);
  for (std::size_t i = 1; i < out.snapshots.size(); ++i) {
    const auto& a = out.snapshots[i - 1];
    const auto& b = out.snapshots[i];
    for (std::size_t k = 0; k < a.broken.size(); ++k)
      if (a.broken[k]) REQUIRE(b.broken[k]);
    for (std::size_t k = 0; k < a.debonded.size(); ++k)
      if (a.debonded[k]) REQUIRE(b.debonded[k]);
  }
  for (std::size_t i = 1; i < out.history.size(); ++i) {
    CHECK(out.history[i].broken_segments >= out.history[i - 1].broken_segments);
    CHECK(out.history[i].failed_links >= out.history[i - 1].failed_links);
    CHECK(out.history[i].perforated_plies >= out.history[i - 1].perforated_plies);
  }
}

TEST_CASE("outcome invariants") {
  const ImpactorState imp{3e-3, 7.2e-3, 567.0};
  const auto out = run_backing(kevlar29(40), imp);
  CHECK(out.residual_velocity_mps >= 0.0);
  CHECK(out.residual_velocity_mps <= imp.velocity_mps);
  CHECK(out.perforated_plies >= 0);
  CHECK(out.perforated_plies <= 40);
  CHECK(out.absorbed_energy_J >= 0.0);
  CHECK_THAT(out.absorbed_energy_J,
             WithinRel(0.5 * imp.mass_kg * (imp.velocity_mps * imp.velocity_mps -
                                            out.residual_velocity_mps * out.residual_velocity_mps),
                       1e-12));
  CHECK_FALSE(out.boundary_reached);
  if (out.status == Status::perforated) CHECK(out.perforated_plies == 40);
  if (out.status == Status::stopped) CHECK(out.residual_velocity_mps == 0.0);
}

TEST_CASE("no plies lets the impactor through unchanged") {
  const auto out = run_backing(kevlar29(40).with_plies(0), {3e-3, 7.2e-3, 567.0});
  CHECK(out.status == Status::perforated);
  CHECK(out.residual_velocity_mps == 567.0);
  CHECK(out.absorbed_energy_J == 0.0);
}

TEST_CASE("more plies never let the impactor out faster") {
  const ImpactorState imp{3e-3, 7.2e-3, 567.0};
  const auto rows = ply_sweep(kevlar29(40), imp, {0, 5, 10, 20, 40});
  REQUIRE(rows.size() == 5);
  double prev = INFINITY;
  for (const auto& r : rows) {
    REQUIRE(r.outcome);
    CHECK(r.outcome->residual_velocity_mps <= prev + 0.01 * imp.velocity_mps);
    prev = r.outcome->residual_velocity_mps;
  }
  CHECK(rows[2].plies == 10);
}

TEST_CASE("a thick slow-impact package stops the impactor") {
  const auto out = run_backing(kevlar29(40), {3e-3, 7.2e-3, 100.0});
  CHECK(out.status == Status::stopped);
  CHECK(out.perforated_plies < 40);
}

TEST_CASE("explicit step above the stability limit is rejected") {
  State s(kevlar29(5), {3e-3, 7.2e-3, 300.0}, {});
  CHECK_THROWS_AS(s.step(2.0 * s.stable_dt()), StabilityError);
  RunSettings set;
  set.dt_s = 1e-6;
  CHECK_THROWS_AS(run_backing(kevlar29(5), {3e-3, 7.2e-3, 300.0}, set), StabilityError);
}

TEST_CASE("mesh validation") {
  CHECK_THROWS_AS(State(kevlar29(5), {3e-3, 7.2e-3, 300.0}, {0.15, 40}), InvalidInput);
  CHECK_THROWS_AS(State(kevlar29(5), {3e-3, 7.2e-3, 300.0}, {0.05, 400}), InvalidInput);
  CHECK_THROWS_AS(State(kevlar29(5), {0.0, 7.2e-3, 300.0}, {}), InvalidInput);
  CHECK_THROWS_AS(run_backing(kevlar29(5), {3e-3, 7.2e-3, -1.0}), InvalidInput);
}

TEST_CASE("footprint nodes move with the impactor") {
  State s(kevlar29(3), {3e-3, 7.2e-3, 400.0}, {});
  const double dt = 0.25 * s.stable_dt();
  for (int i = 0; i < 100; ++i) s.step(dt);
  for (int j = 0; j < s.slaved_nodes(); ++j) CHECK(s.w(0, j) == s.depth());
  CHECK(s.depth() > 0.0);
  CHECK_THAT(s.energy().contact_work,
             WithinRel(0.5 * 3e-3 * 400.0 * 400.0 * (1.0 - 3e-3 / s.body_mass()), 1e-12));
}

TEST_CASE("outcome and history files round-trip") {
  RunSettings set;
  set.snapshot_interval_s = 1e-6;
  const auto out = run_backing(kevlar29(10), {3e-3, 7.2e-3, 500.0}, set);
  std::ostringstream os;
  os << kOutcomeHeader << '\n';
  write_outcome_row(os, out);
  std::istringstream in(os.str());
  const auto t = csv::read(in);
  REQUIRE(t.rows.size() == 1);
  CHECK(csv::parse_number(t.rows[0][5]) == out.residual_velocity_mps);
  CHECK(csv::parse_number(t.rows[0][4]) == out.absorbed_energy_J);

  std::ostringstream hs;
  write_history(hs, out);
  std::istringstream hin(hs.str());
  CHECK(csv::read(hin).rows.size() == out.history.size());

  std::ostringstream ss;
  write_snapshot(ss, out.snapshots.front());
  CHECK(ss.str().rfind("# t_s=", 0) == 0);
}
