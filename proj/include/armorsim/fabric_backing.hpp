#pragma once

// Axisymmetric dynamics of a multi-ply fabric package struck by a rigid flat
// cylinder. Each ply is a membrane with transverse displacement w(r) on a
// uniform radial grid; neighbouring plies are tied by inertialess adhesive
// springs in the normal direction and in shear. Plies rupture segment by
// segment at the limiting strain, adhesive links debond at their stress
// limits and then only resist interpenetration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "armorsim/csv.hpp"
#include "armorsim/error.hpp"
#include "armorsim/materials.hpp"

namespace armorsim::fabric {

/// Rigid projectile entering the package.
struct ImpactorState {
  double mass_kg = 0.0;
  double diameter_m = 0.0;
  double velocity_mps = 0.0;
  double depth_m = 0.0;
  bool stopped = false;
  bool perforated = false;

  double radius() const { return 0.5 * diameter_m; }
};

struct MeshSettings {
  double outer_radius_m = 0.15;
  int radial_cells = 400;
};

struct RunSettings {
  MeshSettings mesh;
  double t_max_s = 400e-6;
  double dt_s = 0.0;            // 0 selects the stability limit times `cfl_safety`
  double cfl_safety = 0.25;
  double penalty_factor = 10.0;  // debonded contact stiffness relative to E_z / h_a
  /// A ply counts as perforated once a segment starting inside
  /// `perforation_margin` footprint radii has ruptured.
  double perforation_margin = 2.0;
  double snapshot_interval_s = 0.0;  // 0 disables snapshots
  double history_interval_s = 1e-6;
};

enum class Status { stopped, perforated, inconclusive };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::stopped: return "stopped";
    case Status::perforated: return "perforated";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

struct EnergyLedger {
  double kinetic = 0.0;
  double strain = 0.0;
  double dissipated = 0.0;    // ruptured segments and debonded adhesive
  double contact_work = 0.0;  // inelastic capture of the struck disc
  double initial = 0.0;

  double total() const { return kinetic + strain + dissipated + contact_work; }
  double relative_error() const { return initial > 0.0 ? std::abs(total() - initial) / initial : 0.0; }
};

/// Displacements and damage masks at one instant.
struct Snapshot {
  double time_s = 0.0;
  double depth_m = 0.0;
  double velocity_mps = 0.0;
  int plies = 0;
  int nodes = 0;
  std::vector<double> w;                // plies x nodes
  std::vector<std::uint8_t> broken;     // plies x (nodes - 1), per segment
  std::vector<std::uint8_t> debonded;   // (plies - 1) x nodes, per link
};

struct HistoryRow {
  double t, V, P;
  int perforated_plies, broken_segments, failed_links;
  EnergyLedger energy;
};

struct BackingOutcome {
  Status status = Status::inconclusive;
  int ply_count = 0;
  double t_end_s = 0.0;
  double depth_m = 0.0;
  int perforated_plies = 0;  // N_p^*
  double absorbed_energy_J = 0.0;
  double residual_velocity_mps = 0.0;
  double max_energy_error = 0.0;
  bool boundary_reached = false;
  long steps = 0;
  double dt_s = 0.0;
  int broken_segments = 0;
  int failed_links = 0;
  std::vector<HistoryRow> history;
  std::vector<Snapshot> snapshots;
};

/// Discretised package plus impactor.
class State {
 public:
  State(const FabricSpec& spec, const ImpactorState& impactor, const MeshSettings& mesh,
        double penalty_factor = 10.0)
      : spec_(spec), imp_(impactor) {
    spec.validate();
    if (!(impactor.mass_kg > 0.0) || !(impactor.diameter_m > 0.0))
      throw InvalidInput("impactor mass and diameter must be positive");
    if (impactor.velocity_mps < 0.0) throw InvalidInput("impactor velocity must be nonnegative");
    if (mesh.radial_cells < 50) throw InvalidInput("mesh needs at least 50 radial cells");
    if (!(mesh.outer_radius_m >= 10.0 * impactor.diameter_m))
      throw InvalidInput("mesh outer radius " + csv::number(mesh.outer_radius_m) +
                         " m must be at least 10 impactor diameters (" + csv::number(10.0 * impactor.diameter_m) +
                         " m)");
    if (!(penalty_factor > 0.0)) throw InvalidInput("penalty factor must be positive");

    np_ = spec.ply_count;
    nc_ = mesh.radial_cells;
    nn_ = nc_ + 1;
    dr_ = mesh.outer_radius_m / nc_;
    mu_ = spec.ply_areal_density();
    hp_ = spec.ply_thickness_m();
    ha_ = spec.adhesive_thickness();
    pitch_ = hp_ + ha_;
    kn_ = spec.adhesive_normal_modulus_Pa / ha_;
    kpen_ = penalty_factor * kn_;
    ks_ = spec.adhesive_shear_modulus_Pa / ha_;
    eps_lim_ = spec.limiting_strain();
    e0_ = spec.ply_curve.energy_density(spec.prestrain);

    r_.resize(nn_);
    area_.resize(nn_);
    for (int j = 0; j < nn_; ++j) {
      r_[j] = j * dr_;
      area_[j] = j == 0 ? kPi * 0.25 * dr_ * dr_ : 2.0 * kPi * r_[j] * dr_;
    }
    seg_area_.resize(nc_);
    for (int j = 0; j < nc_; ++j) seg_area_[j] = 2.0 * kPi * (j + 0.5) * dr_ * dr_;

    w_.assign(std::size_t(np_) * nn_, 0.0);
    v_.assign(w_.size(), 0.0);
    f_.assign(w_.size(), 0.0);
    broken_.assign(std::size_t(np_) * nc_, 0);
    intact_.assign(std::size_t(std::max(np_ - 1, 0)) * nn_, 1);
    offset_.assign(intact_.size(), 0.0);
    shear_.assign(std::size_t(std::max(np_ - 1, 0)) * nc_, 1);
    perforated_.assign(np_, 0);

    slaved_ = 0;
    while (slaved_ < nn_ && r_[slaved_] <= imp_.radius()) ++slaved_;
    slaved_ = std::max(slaved_, 1);
    perforation_radius_ = 0.0;

    body_mass_ = imp_.mass_kg;
    for (int j = 0; j < slaved_; ++j) body_mass_ += mu_ * area_[j];
    energy_.initial = 0.5 * imp_.mass_kg * imp_.velocity_mps * imp_.velocity_mps;
    // Inelastic capture of the struck disc of the first ply.
    body_velocity_ = imp_.mass_kg * imp_.velocity_mps / body_mass_;
    energy_.contact_work = energy_.initial - 0.5 * body_mass_ * body_velocity_ * body_velocity_;
    for (int j = 0; j < slaved_; ++j) v_[j] = body_velocity_;
    compute_forces();
  }

  int plies() const { return np_; }
  int nodes() const { return nn_; }
  double dr() const { return dr_; }
  double time() const { return t_; }
  double depth() const { return body_w_; }
  double velocity() const { return body_velocity_; }
  double body_mass() const { return body_mass_; }
  int slaved_nodes() const { return slaved_; }
  double ply_pitch() const { return pitch_; }
  double limiting_strain() const { return eps_lim_; }
  const ImpactorState& impactor() const { return imp_; }
  double w(int ply, int node) const { return w_[idx(ply, node)]; }
  double wdot(int ply, int node) const { return v_[idx(ply, node)]; }
  bool segment_broken(int ply, int seg) const { return broken_[sidx(ply, seg)] != 0; }
  bool link_intact(int gap, int node) const { return intact_[std::size_t(gap) * nn_ + node] != 0; }
  int broken_segments() const { return nbroken_; }
  int failed_links() const { return nfailed_; }

  /// Sets the ply counting radius (in metres) used by `perforated_plies`.
  void set_perforation_radius(double r) { perforation_radius_ = r; }

  int perforated_plies() const {
    return int(std::count(perforated_.begin(), perforated_.end(), std::uint8_t{1}));
  }

  /// Stability limit: membrane wave crossing one cell, and the stiffest
  /// adhesive spring acting on a ply node from both sides.
  double stable_dt() const {
    const double c = std::sqrt(spec_.ply_curve.max_slope() / spec_.ply_density_kgm3);
    const double shear = 4.0 * ks_ * std::pow(0.5 * pitch_ / dr_, 2);
    const double k = std::max(kpen_, shear);
    const double omega = std::sqrt(4.0 * k / mu_);
    return std::min(dr_ / c, 2.0 / omega);
  }

  /// One velocity-Verlet step followed by the failure sweep.
  void step(double dt) {
    if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
    if (dt > stable_dt() * (1.0 + 1e-12))
      throw StabilityError("time step " + csv::number(dt) + " s exceeds the stability limit " +
                           csv::number(stable_dt()) + " s");
    half_kick(dt);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += dt * v_[i];
    body_w_ += dt * body_velocity_;
    for (int j = 0; j < slaved_; ++j) w_[j] = body_w_;
    for (int k = 0; k < np_; ++k) w_[idx(k, nc_)] = 0.0;
    failure_sweep();
    compute_forces();
    half_kick(dt);
    t_ += dt;
    if (!std::isfinite(body_velocity_) || !std::isfinite(body_w_))
      throw StabilityError("non-finite impactor state at t=" + csv::number(t_));
  }

  EnergyLedger energy() const {
    EnergyLedger e = energy_;
    e.kinetic = 0.5 * imp_.mass_kg * body_velocity_ * body_velocity_;
    e.strain = 0.0;
    for (int k = 0; k < np_; ++k) {
      for (int j = 0; j < nn_; ++j) {
        const double m = mu_ * area_[j];
        const double vv = v_[idx(k, j)];
        e.kinetic += 0.5 * m * vv * vv;
      }
      for (int j = 0; j < nc_; ++j)
        if (!broken_[sidx(k, j)]) e.strain += segment_energy(k, j);
    }
    for (int g = 0; g + 1 < np_; ++g) {
      for (int j = 0; j < nn_; ++j) e.strain += link_energy(g, j);
      for (int j = 0; j < nc_; ++j)
        if (shear_[std::size_t(g) * nc_ + j]) e.strain += shear_energy(g, j);
    }
    return e;
  }

  /// Largest |w| on the outermost free ring relative to the global maximum.
  double boundary_disturbance() const {
    double edge = 0.0, peak = 0.0;
    for (int k = 0; k < np_; ++k) {
      for (int j = 0; j < nn_; ++j) peak = std::max(peak, std::abs(w_[idx(k, j)]));
      edge = std::max(edge, std::abs(w_[idx(k, nc_ - 1)]));
    }
    return peak > 0.0 ? edge / peak : 0.0;
  }

  Snapshot snapshot() const {
    Snapshot s;
    s.time_s = t_;
    s.depth_m = body_w_;
    s.velocity_mps = body_velocity_;
    s.plies = np_;
    s.nodes = nn_;
    s.w = w_;
    s.broken = broken_;
    s.debonded.resize(intact_.size());
    for (std::size_t i = 0; i < intact_.size(); ++i) s.debonded[i] = intact_[i] ? 0 : 1;
    return s;
  }

 private:
  std::size_t idx(int k, int j) const { return std::size_t(k) * nn_ + j; }
  std::size_t sidx(int k, int j) const { return std::size_t(k) * nc_ + j; }

  double segment_strain(double dw) const { return std::sqrt(1.0 + (dw / dr_) * (dw / dr_)) - 1.0 + spec_.prestrain; }

  double segment_energy(int k, int j) const {
    const double eps = segment_strain(w_[idx(k, j + 1)] - w_[idx(k, j)]);
    return (spec_.ply_curve.energy_density(eps) - e0_) * hp_ * seg_area_[j];
  }

  double link_energy(int g, int j) const {
    const std::size_t l = std::size_t(g) * nn_ + j;
    const double dw = w_[idx(g + 1, j)] - w_[idx(g, j)];
    if (intact_[l]) return 0.5 * kn_ * dw * dw * area_[j];
    const double d = std::min(0.0, dw - offset_[l]);
    return 0.5 * kpen_ * d * d * area_[j];
  }

  double slip(int g, int j) const {
    const double s_top = w_[idx(g, j + 1)] - w_[idx(g, j)];
    const double s_bot = w_[idx(g + 1, j + 1)] - w_[idx(g + 1, j)];
    return (s_bot - s_top) / dr_ * 0.5 * pitch_;
  }

  double shear_energy(int g, int j) const {
    const double d = slip(g, j);
    return 0.5 * ks_ * d * d * seg_area_[j];
  }

  void half_kick(double dt) {
    const double h = 0.5 * dt;
    for (int k = 0; k < np_; ++k)
      for (int j = 0; j < nc_; ++j) {
        const std::size_t i = idx(k, j);
        v_[i] += h * f_[i] / (mu_ * area_[j]);
      }
    double fb = 0.0;
    for (int j = 0; j < slaved_; ++j) fb += f_[j];
    body_velocity_ += h * fb / body_mass_;
    for (int j = 0; j < slaved_; ++j) v_[j] = body_velocity_;
    for (int k = 0; k < np_; ++k) v_[idx(k, nc_)] = 0.0;
  }

  void compute_forces() {
    std::fill(f_.begin(), f_.end(), 0.0);
    for (int k = 0; k < np_; ++k) {
      const std::size_t b = idx(k, 0);
      for (int j = 0; j < nc_; ++j) {
        if (broken_[sidx(k, j)]) continue;
        const double dw = w_[b + j + 1] - w_[b + j];
        const double l = std::hypot(dr_, dw);
        const double eps = l / dr_ - 1.0 + spec_.prestrain;
        const double t = spec_.ply_curve.stress(eps) * hp_ * seg_area_[j] * dw / (l * dr_);
        f_[b + j] += t;
        f_[b + j + 1] -= t;
      }
    }
    for (int g = 0; g + 1 < np_; ++g) {
      const std::size_t top = idx(g, 0), bot = idx(g + 1, 0), lb = std::size_t(g) * nn_;
      for (int j = 0; j < nn_; ++j) {
        const double dw = w_[bot + j] - w_[top + j];
        double p;
        if (intact_[lb + j]) {
          p = kn_ * dw * area_[j];
        } else {
          const double d = dw - offset_[lb + j];
          p = d < 0.0 ? kpen_ * d * area_[j] : 0.0;
        }
        f_[bot + j] -= p;
        f_[top + j] += p;
      }
      const std::size_t sb = std::size_t(g) * nc_;
      const double c = 0.5 * pitch_ / dr_;
      for (int j = 0; j < nc_; ++j) {
        if (!shear_[sb + j]) continue;
        const double q = ks_ * slip(g, j) * seg_area_[j] * c;
        f_[bot + j + 1] -= q;
        f_[bot + j] += q;
        f_[top + j + 1] += q;
        f_[top + j] -= q;
      }
    }
  }

  void deactivate_shear(int g, int j) {
    const std::size_t s = std::size_t(g) * nc_ + j;
    if (!shear_[s]) return;
    energy_.dissipated += shear_energy(g, j);
    shear_[s] = 0;
  }

  void failure_sweep() {
    std::vector<std::pair<int, int>> rupture;
    for (int k = 0; k < np_; ++k)
      for (int j = 0; j < nc_; ++j)
        if (!broken_[sidx(k, j)] && segment_strain(w_[idx(k, j + 1)] - w_[idx(k, j)]) >= eps_lim_)
          rupture.emplace_back(k, j);

    std::vector<std::pair<int, int>> debond;
    const double lim_z = spec_.adhesive_normal_limit_Pa, lim_s = spec_.adhesive_shear_limit_Pa;
    for (int g = 0; g + 1 < np_; ++g)
      for (int j = 0; j < nn_; ++j) {
        const std::size_t l = std::size_t(g) * nn_ + j;
        if (!intact_[l]) continue;
        bool fail = std::abs(kn_ * (w_[idx(g + 1, j)] - w_[idx(g, j)])) >= lim_z;
        for (int s : {j - 1, j})
          if (!fail && s >= 0 && s < nc_ && shear_[std::size_t(g) * nc_ + s])
            fail = std::abs(ks_ * slip(g, s)) >= lim_s;
        if (fail) debond.emplace_back(g, j);
      }

    for (auto [k, j] : rupture) {
      energy_.dissipated += segment_energy(k, j);
      broken_[sidx(k, j)] = 1;
      ++nbroken_;
      if (k > 0) deactivate_shear(k - 1, j);
      if (k + 1 < np_) deactivate_shear(k, j);
      if (r_[j] < perforation_radius_) perforated_[k] = 1;
    }
    for (auto [g, j] : debond) {
      const std::size_t l = std::size_t(g) * nn_ + j;
      const double before = link_energy(g, j);
      for (int s : {j - 1, j})
        if (s >= 0 && s < nc_) deactivate_shear(g, s);
      const double dw = w_[idx(g + 1, j)] - w_[idx(g, j)];
      intact_[l] = 0;
      offset_[l] = std::min(0.0, (1.0 - kn_ / kpen_) * dw);
      energy_.dissipated += before - link_energy(g, j);
      ++nfailed_;
    }
  }

  FabricSpec spec_;
  ImpactorState imp_;
  int np_ = 0, nc_ = 0, nn_ = 0;
  double dr_ = 0.0, mu_ = 0.0, hp_ = 0.0, ha_ = 0.0, pitch_ = 0.0;
  double kn_ = 0.0, kpen_ = 0.0, ks_ = 0.0, eps_lim_ = 0.0, e0_ = 0.0;
  std::vector<double> r_, area_, seg_area_;
  std::vector<double> w_, v_, f_;
  std::vector<std::uint8_t> broken_, intact_, shear_, perforated_;
  std::vector<double> offset_;
  int slaved_ = 1;
  double body_mass_ = 0.0, body_w_ = 0.0, body_velocity_ = 0.0;
  double perforation_radius_ = 0.0;
  double t_ = 0.0;
  int nbroken_ = 0, nfailed_ = 0;
  EnergyLedger energy_;
};

inline State build_mesh(const FabricSpec& fabric, const ImpactorState& impactor, const MeshSettings& mesh = {},
                        double penalty_factor = 10.0) {
  return State(fabric, impactor, mesh, penalty_factor);
}

inline EnergyLedger energy_audit(const State& s) { return s.energy(); }

inline BackingOutcome run_backing(const FabricSpec& fabric, const ImpactorState& impactor,
                                  const RunSettings& set = {}) {
  if (impactor.velocity_mps < 0.0) throw InvalidInput("impactor velocity must be nonnegative");
  BackingOutcome out;
  out.ply_count = fabric.ply_count;
  auto absorbed = [&](double vr) {
    return 0.5 * impactor.mass_kg * (impactor.velocity_mps * impactor.velocity_mps - vr * vr);
  };
  if (fabric.ply_count == 0) {
    out.status = Status::perforated;
    out.residual_velocity_mps = impactor.velocity_mps;
    return out;
  }
  if (impactor.velocity_mps == 0.0) {
    out.status = Status::stopped;
    return out;
  }

  State s(fabric, impactor, set.mesh, set.penalty_factor);
  s.set_perforation_radius(set.perforation_margin * impactor.radius());
  const double dt = set.dt_s > 0.0 ? set.dt_s : set.cfl_safety * s.stable_dt();
  out.dt_s = dt;

  auto record = [&] {
    const auto e = s.energy();
    out.max_energy_error = std::max(out.max_energy_error, e.relative_error());
    out.history.push_back({s.time(), s.velocity(), s.depth(), s.perforated_plies(), s.broken_segments(),
                           s.failed_links(), e});
  };
  record();
  if (set.snapshot_interval_s > 0.0) out.snapshots.push_back(s.snapshot());
  double next_history = set.history_interval_s, next_snapshot = set.snapshot_interval_s;

  for (;;) {
    s.step(dt);
    ++out.steps;
    if (s.velocity() <= 0.0) {
      out.status = Status::stopped;
      break;
    }
    if (s.perforated_plies() == s.plies()) {
      out.status = Status::perforated;
      break;
    }
    if (s.time() >= set.t_max_s) {
      out.status = Status::inconclusive;
      break;
    }
    if (set.history_interval_s > 0.0 && s.time() >= next_history) {
      record();
      next_history += set.history_interval_s;
    }
    if (set.snapshot_interval_s > 0.0 && s.time() >= next_snapshot) {
      out.snapshots.push_back(s.snapshot());
      next_snapshot += set.snapshot_interval_s;
    }
    if (!out.boundary_reached && s.boundary_disturbance() > 1e-6) out.boundary_reached = true;
  }
  record();
  if (set.snapshot_interval_s > 0.0) out.snapshots.push_back(s.snapshot());

  out.t_end_s = s.time();
  out.depth_m = s.depth();
  out.perforated_plies = s.perforated_plies();
  out.residual_velocity_mps = out.status == Status::stopped ? 0.0 : s.velocity();
  out.absorbed_energy_J = absorbed(out.residual_velocity_mps);
  out.broken_segments = s.broken_segments();
  out.failed_links = s.failed_links();
  return out;
}

struct SweepRow {
  int plies = 0;
  std::optional<BackingOutcome> outcome;
  std::string error;
};

/// Independent runs over ply counts with the per-ply areal density held fixed.
inline std::vector<SweepRow> ply_sweep(const FabricSpec& per_ply, const ImpactorState& impactor,
                                       const std::vector<int>& ply_counts, const RunSettings& set = {}) {
  std::vector<SweepRow> rows;
  for (int n : ply_counts) {
    if (n < 0 || n > 200) throw InvalidInput("ply count " + std::to_string(n) + " outside [0, 200]");
    SweepRow row;
    row.plies = n;
    try {
      row.outcome = run_backing(per_ply.with_plies(n), impactor, set);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr const char* kOutcomeHeader = "Np,t_end_us,P_mm,Np_star,Wc_J,Vr_mps";

inline void write_outcome_row(std::ostream& os, const BackingOutcome& o) {
  os << o.ply_count << ',' << csv::number(o.t_end_s * 1e6) << ',' << csv::number(o.depth_m * 1e3) << ','
     << o.perforated_plies << ',' << csv::number(o.absorbed_energy_J) << ','
     << csv::number(o.residual_velocity_mps) << '\n';
}

inline constexpr const char* kHistoryHeader =
    "t_s,V_mps,P_m,perforated_plies,broken_segments,failed_links,kinetic_J,strain_J,dissipated_J,contact_J,"
    "balance_error";

inline void write_history(std::ostream& os, const BackingOutcome& o) {
  os << kHistoryHeader << '\n';
  for (const auto& h : o.history)
    os << csv::number(h.t) << ',' << csv::number(h.V) << ',' << csv::number(h.P) << ',' << h.perforated_plies
       << ',' << h.broken_segments << ',' << h.failed_links << ',' << csv::number(h.energy.kinetic) << ','
       << csv::number(h.energy.strain) << ',' << csv::number(h.energy.dissipated) << ','
       << csv::number(h.energy.contact_work) << ',' << csv::number(h.energy.relative_error()) << '\n';
}

/// Plain-text matrices: displacement per ply and node, ruptured segments per
/// ply, debonded links per ply gap.
inline void write_snapshot(std::ostream& os, const Snapshot& s) {
  os << "# t_s=" << csv::number(s.time_s) << " P_m=" << csv::number(s.depth_m)
     << " V_mps=" << csv::number(s.velocity_mps) << " plies=" << s.plies << " nodes=" << s.nodes << '\n';
  os << "# w_m\n";
  for (int k = 0; k < s.plies; ++k) {
    for (int j = 0; j < s.nodes; ++j) os << (j ? " " : "") << csv::number(s.w[std::size_t(k) * s.nodes + j]);
    os << '\n';
  }
  os << "# broken\n";
  for (int k = 0; k < s.plies; ++k) {
    for (int j = 0; j + 1 < s.nodes; ++j) os << (j ? " " : "") << int(s.broken[std::size_t(k) * (s.nodes - 1) + j]);
    os << '\n';
  }
  os << "# debonded\n";
  for (int g = 0; g + 1 < s.plies; ++g) {
    for (int j = 0; j < s.nodes; ++j) os << (j ? " " : "") << int(s.debonded[std::size_t(g) * s.nodes + j]);
    os << '\n';
  }
}

}  // namespace armorsim::fabric
