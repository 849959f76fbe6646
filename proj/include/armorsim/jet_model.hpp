#pragma once

// Quasi-steady plastic-flow jet model of long-rod penetration with backward
// jets. Each time step closes seven unknowns (interface speeds, backward-jet
// speeds and the flow-zone, mushroom-cup and crater radii) by a fixed-point
// iteration on the backward-jet plastic-work factors, then advances the
// projectile with the Tate deceleration law.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "armorsim/csv.hpp"
#include "armorsim/error.hpp"
#include "armorsim/materials.hpp"
#include "armorsim/quadrature.hpp"

namespace armorsim::jet {

enum class StopReason {
  none,
  beta_ge_1,
  velocity_le_0,
  vt_minus_le_0,
  vp_minus_le_0,
  eroded,
  imaginary_branch,
  facing_breached,
};

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::beta_ge_1: return "beta_ge_1";
    case StopReason::velocity_le_0: return "V_le_0";
    case StopReason::vt_minus_le_0: return "Vt_minus_le_0";
    case StopReason::vp_minus_le_0: return "Vp_minus_le_0";
    case StopReason::eroded: return "eroded";
    case StopReason::imaginary_branch: return "imaginary_branch";
    case StopReason::facing_breached: return "facing_breached";
  }
  return "?";
}

/// Raised by a sub-step when one of the model's termination conditions holds.
class Termination : public Error {
 public:
  Termination(StopReason reason, const std::string& detail)
      : Error(std::string(to_string(reason)) + ": " + detail), reason_(reason) {}
  StopReason reason() const { return reason_; }

 private:
  StopReason reason_;
};

/// Material constants entering one quasi-steady closure.
struct FlowInputs {
  double target_density = 0.0;
  double projectile_density = 0.0;
  double target_strength = 0.0;      // sigma_t at the current depth
  double projectile_strength = 0.0;  // sigma_p
  double target_yield = 0.0;         // sigma_Y^(t) at the current depth
  double projectile_yield = 0.0;     // sigma_Y^(p)
  double rod_radius = 0.0;           // r_0
};

struct InterfaceSpeeds {
  double penetration = 0.0;  // V_t-
  double erosion = 0.0;      // V_p-
};

struct BackwardSpeeds {
  double target = 0.0;      // V_t+
  double projectile = 0.0;  // V_p+
};

struct Radii {
  double flow = 0.0;    // R
  double cup = 0.0;     // R_1
  double crater = 0.0;  // R_0
};

struct PlasticWork {
  double target = 0.0;      // sigma_t+
  double projectile = 0.0;  // sigma_p+
};

namespace detail {

inline InterfaceSpeeds admissible(double V, double vt) {
  if (vt > V) throw Termination(StopReason::vp_minus_le_0, "no erosion: stagnation root V_t- exceeds V");
  if (vt < 0.0) throw Termination(StopReason::vt_minus_le_0, "no penetration: stagnation root V_t- below 0");
  return {vt, V - vt};
}

}  // namespace detail

/// Stagnation-point balance: V_p- = V - V_t- and
/// rho_t V_t-^2 + 2 sigma_t = rho_p V_p-^2 + 2 sigma_p, root with V_t- in [0, V].
inline InterfaceSpeeds solve_interface(double V, double rho_t, double rho_p, double sigma_t, double sigma_p) {
  if (!(V > 0.0) || !(rho_t > 0.0) || !(rho_p > 0.0))
    throw InvalidInput("solve_interface: velocity and densities must be positive");
  const double beta = 2.0 * (sigma_t - sigma_p) / (rho_p * V * V);
  if (beta >= 1.0)
    throw Termination(StopReason::beta_ge_1, "target resistance exceeds stagnation pressure at V=" + csv::number(V));
  // (rho_t - rho_p) x^2 + 2 rho_p V x + (2 dsigma - rho_p V^2) = 0
  const double a = rho_t - rho_p;
  const double b = 2.0 * rho_p * V;
  const double c = 2.0 * (sigma_t - sigma_p) - rho_p * V * V;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) throw Termination(StopReason::imaginary_branch, "interface discriminant negative");
  return detail::admissible(V, -2.0 * c / (b + std::sqrt(disc)));
}

/// Closed form of the interface balance with alpha = rho_t/rho_p,
/// gamma = 1 - alpha and beta = 2 (sigma_t - sigma_p) / (rho_p V^2).
inline InterfaceSpeeds solve_interface_closed_form(double V, double rho_t, double rho_p, double sigma_t,
                                                   double sigma_p) {
  const double alpha = rho_t / rho_p;
  const double gamma = 1.0 - alpha;
  const double beta = 2.0 * (sigma_t - sigma_p) / (rho_p * V * V);
  if (beta >= 1.0) throw Termination(StopReason::beta_ge_1, "closed form: beta >= 1");
  if (alpha == 1.0) return detail::admissible(V, 0.5 * V * (1.0 - beta));
  const double rad = 1.0 - gamma * (1.0 - beta);
  if (rad < 0.0) throw Termination(StopReason::imaginary_branch, "closed form: negative radicand");
  const double root = std::sqrt(rad);
  return detail::admissible(V, V * (1.0 - root) / gamma);
}

/// Backward-jet Bernoulli balances for the target and projectile jets.
inline BackwardSpeeds backward_jet_speeds(const InterfaceSpeeds& s, const FlowInputs& in, const PlasticWork& w) {
  const double rt = s.penetration * s.penetration + 2.0 * (in.target_strength - w.target) / in.target_density;
  const double rp = s.erosion * s.erosion + 2.0 * (in.projectile_strength - w.projectile) / in.projectile_density;
  if (rt < 0.0) throw Termination(StopReason::imaginary_branch, "target backward jet radicand negative");
  if (rp < 0.0) throw Termination(StopReason::imaginary_branch, "projectile backward jet radicand negative");
  return {std::sqrt(rt), std::sqrt(rp)};
}

/// Momentum balance over the flow zone plus incompressibility of both jets.
inline Radii solve_radii(const InterfaceSpeeds& s, const BackwardSpeeds& b, const FlowInputs& in) {
  if (!(b.target > 0.0) || !(b.projectile > 0.0))
    throw ModelBreakdown("solve_radii: backward jet speeds must be positive");
  const double a_t = s.penetration / b.target;
  const double a_p = s.erosion / b.projectile;
  const double r0sq = in.rod_radius * in.rod_radius;
  const double num = in.projectile_strength + in.projectile_density * s.erosion * s.erosion +
                     a_p * in.projectile_density * b.projectile * b.projectile;
  const double den = in.target_strength + in.target_density * s.penetration * s.penetration -
                     a_t * in.target_density * b.target * b.target;
  if (!(den > 0.0)) throw ModelBreakdown("solve_radii: nonpositive momentum denominator " + csv::number(den));
  const double Rsq = r0sq * num / den;
  const double R1sq = Rsq * (1.0 - a_t);
  if (!(R1sq > 0.0))
    throw ModelBreakdown("solve_radii: cup radius squared nonpositive (V_t-/V_t+ = " + csv::number(a_t) + ")");
  const double R0sq = R1sq - a_p * r0sq;
  if (!(R0sq > 0.0)) throw ModelBreakdown("solve_radii: crater radius squared nonpositive " + csv::number(R0sq));
  return {std::sqrt(Rsq), std::sqrt(R1sq), std::sqrt(R0sq)};
}

/// Which stretch ratio to use for the projectile jet. `geometric` takes the
/// crater radius as the inner radius of the projectile jet; `printed` reuses
/// the target-jet expression R^2 / (lambda_z R_1^2).
enum class ProjectileLambda { geometric, printed };

/// (1 / (lambda sqrt 3)) * int_0^lambda sqrt(ln^2(1 + 1/x) + 3 ln^2 lambda_z) dx.
///
/// Evaluated after substituting x = lambda u^4, which removes the logarithmic
/// endpoint behaviour at x -> 0.
inline double plastic_work_ratio(double lambda, double lambda_z, double abs_tol = 1e-10) {
  if (!(lambda > 0.0) || !(lambda_z > 0.0))
    throw ModelBreakdown("plastic work: stretch ratios must be positive (lambda=" + csv::number(lambda) +
                         ", lambda_z=" + csv::number(lambda_z) + ")");
  const double axial = 3.0 * std::pow(std::log(lambda_z), 2);
  auto g = [&](double u) {
    const double u2 = u * u;
    const double l = std::log1p(1.0 / (lambda * u2 * u2));
    return u2 * u * std::sqrt(l * l + axial);
  };
  // int_0^lambda f dx = 4 lambda int_0^1 u^3 f(lambda u^4) du
  quad::Options opt;
  opt.abs_tol = abs_tol / (4.0 * lambda);
  opt.rel_tol = 1e-13;
  const auto r = quad::integrate(g, 0.0, 1.0, opt);
  return 4.0 * r.value / std::sqrt(3.0);
}

struct StretchRatios {
  double target_lambda, target_lambda_z, projectile_lambda, projectile_lambda_z;
};

inline StretchRatios stretch_ratios(const Radii& r, double rod_radius, ProjectileLambda variant) {
  const double R2 = r.flow * r.flow, R12 = r.cup * r.cup, R02 = r.crater * r.crater;
  const double r02 = rod_radius * rod_radius;
  StretchRatios s;
  s.target_lambda_z = R2 / (R2 - R12);
  s.target_lambda = R2 / (s.target_lambda_z * R12);
  s.projectile_lambda_z = r02 / (R12 - R02);
  s.projectile_lambda = variant == ProjectileLambda::geometric ? r02 / (s.projectile_lambda_z * R02)
                                                               : R2 / (s.projectile_lambda_z * R12);
  return s;
}

inline PlasticWork plastic_work_factors(const Radii& r, double rod_radius, double target_yield,
                                        double projectile_yield,
                                        ProjectileLambda variant = ProjectileLambda::geometric) {
  if (!(r.flow > r.cup && r.cup > r.crater && r.crater > 0.0))
    throw ModelBreakdown("plastic work: radii must satisfy R > R1 > R0 > 0");
  const auto s = stretch_ratios(r, rod_radius, variant);
  return {target_yield * plastic_work_ratio(s.target_lambda, s.target_lambda_z),
          projectile_yield * plastic_work_ratio(s.projectile_lambda, s.projectile_lambda_z)};
}

struct JetClosure {
  InterfaceSpeeds interface;
  BackwardSpeeds backward;
  Radii radii;
  PlasticWork work;  // factors the speeds and radii were computed with
  int iterations = 0;
  bool relaxed = false;
};

struct IterationSettings {
  double tolerance = 1e-6;
  int max_iterations = 100;
  double relaxation = 0.5;  // engaged once the updates start alternating in sign
  int max_backtracks = 30;
  ProjectileLambda projectile_lambda = ProjectileLambda::geometric;
};

/// Fixed-point closure at projectile velocity V. Starts from the yield limits
/// unless `initial` is given.
inline JetClosure converge_step(double V, const FlowInputs& in, const IterationSettings& set = {},
                                std::optional<PlasticWork> initial = std::nullopt) {
  if (!(V > 0.0)) throw Termination(StopReason::velocity_le_0, "projectile velocity is not positive");
  JetClosure c;
  c.interface = solve_interface(V, in.target_density, in.projectile_density, in.target_strength,
                                in.projectile_strength);
  if (!(c.interface.penetration > 0.0)) throw Termination(StopReason::vt_minus_le_0, "penetration speed <= 0");
  if (!(c.interface.erosion > 0.0)) throw Termination(StopReason::vp_minus_le_0, "erosion speed <= 0");

  PlasticWork work = initial.value_or(PlasticWork{in.target_yield, in.projectile_yield});
  PlasticWork valid = work;
  // Updates are compared in units of the yield limits so both components weigh alike.
  const double st = in.target_yield, sp = in.projectile_yield;
  double prev_dt = 0.0, prev_dp = 0.0;
  double omega = 1.0;
  bool relaxing = false;
  int backtracks = 0;
  for (int it = 1; it <= set.max_iterations; ++it) {
    c.work = work;
    PlasticWork next;
    try {
      c.backward = backward_jet_speeds(c.interface, in, work);
      c.radii = solve_radii(c.interface, c.backward, in);
      next = plastic_work_factors(c.radii, in.rod_radius, in.target_yield, in.projectile_yield,
                                  set.projectile_lambda);
    } catch (const Error&) {
      // An update overshot out of the admissible region: retreat halfway to
      // the last admissible iterate and continue under relaxation.
      if (it == 1 || ++backtracks > set.max_backtracks) throw;
      work.target = 0.5 * (work.target + valid.target);
      work.projectile = 0.5 * (work.projectile + valid.projectile);
      if (!relaxing) omega = set.relaxation;
      relaxing = true;
      prev_dt = prev_dp = 0.0;
      continue;
    }
    valid = work;
    const double dt = next.target - work.target;
    const double dp = next.projectile - work.projectile;
    const double change = std::max(std::abs(dt) / std::abs(next.target), std::abs(dp) / std::abs(next.projectile));
    if (change <= set.tolerance) {
      c.iterations = it;
      c.relaxed = relaxing;
      return c;
    }
    if (!relaxing && it > 1 && (dt * prev_dt < 0.0 || dp * prev_dp < 0.0)) {
      relaxing = true;
      omega = set.relaxation;
    } else if (relaxing && (prev_dt != 0.0 || prev_dp != 0.0)) {
      // Aitken update of the relaxation factor from successive residuals.
      const double et = (dt - prev_dt) / st, ep = (dp - prev_dp) / sp;
      const double denom = et * et + ep * ep;
      if (denom > 0.0) {
        omega = -omega * ((prev_dt / st) * et + (prev_dp / sp) * ep) / denom;
        omega = std::clamp(omega, 0.05, 1.0);
      }
    }
    prev_dt = dt;
    prev_dp = dp;
    work.target += omega * dt;
    work.projectile += omega * dp;
  }
  if (backtracks > 0)
    throw Termination(StopReason::imaginary_branch,
                      "no admissible plastic-work fixed point at V=" + csv::number(V));
  throw ConvergenceError("jet closure did not converge in " + std::to_string(set.max_iterations) +
                         " iterations at V=" + csv::number(V));
}

/// Relative residuals of the closure equations.
struct ClosureResiduals {
  double kinematic = 0.0;       // V_p- = V - V_t-
  double stagnation = 0.0;      // interface Bernoulli balance
  double target_jet = 0.0;      // target backward-jet Bernoulli
  double projectile_jet = 0.0;  // projectile backward-jet Bernoulli
  double momentum = 0.0;
  double target_volume = 0.0;      // target incompressibility
  double projectile_volume = 0.0;  // projectile incompressibility

  double max() const {
    return std::max({kinematic, stagnation, target_jet, projectile_jet, momentum, target_volume,
                     projectile_volume});
  }
};

inline ClosureResiduals residuals(const JetClosure& c, double V, const FlowInputs& in) {
  auto rel = [](double lhs, double rhs) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
  };
  const double vt = c.interface.penetration, vp = c.interface.erosion;
  const double vtp = c.backward.target, vpp = c.backward.projectile;
  const double R2 = c.radii.flow * c.radii.flow, R12 = c.radii.cup * c.radii.cup,
               R02 = c.radii.crater * c.radii.crater;
  const double r02 = in.rod_radius * in.rod_radius;
  const double rt = in.target_density, rp = in.projectile_density;
  ClosureResiduals r;
  r.kinematic = std::abs(vp - (V - vt)) / V;
  r.stagnation = rel(rt * vt * vt + 2 * in.target_strength, rp * vp * vp + 2 * in.projectile_strength);
  r.target_jet = rel(rt * vt * vt + 2 * in.target_strength, rt * vtp * vtp + 2 * c.work.target);
  r.projectile_jet = rel(rp * vp * vp + 2 * in.projectile_strength, rp * vpp * vpp + 2 * c.work.projectile);
  r.momentum = rel(R2 * (in.target_strength + rt * vt * vt),
                   (R2 - R12) * rt * vtp * vtp + r02 * (in.projectile_strength + rp * vp * vp) +
                       (R12 - R02) * rp * vpp * vpp);
  r.target_volume = rel(R2 * vt, (R2 - R12) * vtp);
  r.projectile_volume = rel(r02 * vp, (R12 - R02) * vpp);
  return r;
}

// ---------------------------------------------------------------------------
// Transient integration

struct JetProblem {
  ProjectileSpec projectile;
  ThickFacingSpec facing;

  FlowInputs flow_at(double depth_m) const {
    const auto s = eval_profile(facing.profile, depth_m);
    return {facing.density_kgm3, projectile.density_kgm3, s.strength_Pa, projectile.strength_Pa,
            s.yield_Pa,          projectile.yield_Pa,     projectile.radius_m};
  }
};

inline JetClosure converge_step(double V, double depth_m, const JetProblem& problem,
                                const IterationSettings& set = {}) {
  return converge_step(V, problem.flow_at(depth_m), set);
}

struct TransientState {
  double time_s = 0.0;
  double velocity_mps = 0.0;
  double residual_length_m = 0.0;
  double mass_kg = 0.0;
  double depth_m = 0.0;
  double crater_volume_m3 = 0.0;
};

struct TraceRow {
  double t, V, vt_minus, vp_minus, vt_plus, vp_plus, R, R1, R0, Lr, P, Q;
};

struct ExitState {
  double time_s = 0.0;
  double velocity_mps = 0.0;
  double mass_kg = 0.0;
  double diameter_m = 0.0;  // 2 R_1 at breach
  double depth_m = 0.0;
};

struct IntegrationSettings {
  double dt = 10e-9;
  double max_relative_dv = 0.01;  // per-step velocity change before the step is halved
  int max_halvings = 40;
  int record_every = 1;
  long max_steps = 20'000'000;
  IterationSettings iteration;
};

struct JetRun {
  std::vector<TraceRow> trace;
  StopReason reason = StopReason::none;
  std::string detail;
  TransientState final_state;
  std::optional<ExitState> exit;
  std::optional<JetClosure> first_closure;
  long steps = 0;
  long rejected_steps = 0;  // step halvings
  int max_iterations = 0;
  double max_residual = 0.0;
  double initial_velocity = 0.0;
  double initial_length = 0.0;
  double initial_volume = 0.0;  // pi r_0^2 L_0
};

inline JetRun integrate(const JetProblem& problem, double V0, const IntegrationSettings& set = {}) {
  const auto& proj = problem.projectile;
  proj.validate();
  problem.facing.validate();
  if (!(V0 > 0.0)) throw InvalidInput("impact velocity must be positive");
  if (!(set.dt > 0.0)) throw InvalidInput("time step must be positive");

  const double area = kPi * proj.radius_m * proj.radius_m;
  JetRun run;
  run.initial_velocity = V0;
  run.initial_length = proj.length_m;
  run.initial_volume = area * proj.length_m;

  TransientState s;
  s.velocity_mps = V0;
  s.residual_length_m = proj.length_m;
  s.mass_kg = area * proj.density_kgm3 * s.residual_length_m;

  std::optional<JetClosure> last;
  auto record = [&](const TransientState& st, const JetClosure* c) {
    TraceRow row{st.time_s, st.velocity_mps, 0, 0, 0, 0, 0, 0, 0, st.residual_length_m, st.depth_m,
                 st.crater_volume_m3};
    if (c) {
      row.vt_minus = c->interface.penetration;
      row.vp_minus = c->interface.erosion;
      row.vt_plus = c->backward.target;
      row.vp_plus = c->backward.projectile;
      row.R = c->radii.flow;
      row.R1 = c->radii.cup;
      row.R0 = c->radii.crater;
    }
    run.trace.push_back(row);
  };

  for (;;) {
    if (run.steps >= set.max_steps) throw ConvergenceError("jet integration exceeded the step budget");
    const auto flow = problem.flow_at(s.depth_m);
    JetClosure c;
    try {
      c = converge_step(s.velocity_mps, flow, set.iteration);
    } catch (const Termination& t) {
      run.reason = t.reason();
      run.detail = t.what();
      break;
    }
    if (!run.first_closure) run.first_closure = c;
    run.max_iterations = std::max(run.max_iterations, c.iterations);
    run.max_residual = std::max(run.max_residual, residuals(c, s.velocity_mps, flow).max());
    if (run.steps % set.record_every == 0) record(s, &c);
    last = c;

    // Tate deceleration: dV/dt = -sigma_p pi r_0^2 / m = -sigma_p / (rho_p L_r).
    const double decel = proj.strength_Pa / (proj.density_kgm3 * s.residual_length_m);
    double dt = set.dt;
    for (int h = 0; h < set.max_halvings && decel * dt > set.max_relative_dv * s.velocity_mps; ++h) {
      dt *= 0.5;
      ++run.rejected_steps;
    }
    s.residual_length_m -= c.interface.erosion * dt;
    s.depth_m += c.interface.penetration * dt;
    s.crater_volume_m3 += kPi * c.radii.crater * c.radii.crater * c.interface.penetration * dt;
    s.velocity_mps -= decel * dt;
    s.time_s += dt;
    ++run.steps;
    if (s.residual_length_m <= 0.0) {
      s.residual_length_m = 0.0;
      s.mass_kg = 0.0;
      run.reason = StopReason::eroded;
      run.detail = "projectile fully eroded";
      break;
    }
    s.mass_kg = area * proj.density_kgm3 * s.residual_length_m;
    if (s.depth_m >= problem.facing.thickness_m) {
      run.reason = StopReason::facing_breached;
      run.detail = "penetration depth reached facing thickness";
      run.exit = ExitState{s.time_s, s.velocity_mps, s.mass_kg, 2.0 * c.radii.cup, s.depth_m};
      break;
    }
    if (s.velocity_mps <= 0.0) {
      run.reason = StopReason::velocity_le_0;
      run.detail = "projectile velocity reached zero";
      break;
    }
  }
  run.final_state = s;
  record(s, last ? &*last : nullptr);
  return run;
}

// ---------------------------------------------------------------------------
// Normalization and export

struct NormalizedRow {
  double t, P, Lr, V, vt_minus, vp_minus, vt_plus, vp_plus, Q;
};

inline std::vector<NormalizedRow> normalized_trace(const JetRun& run) {
  std::vector<NormalizedRow> out;
  out.reserve(run.trace.size());
  const double L0 = run.initial_length, V0 = run.initial_velocity, q = run.initial_volume;
  for (const auto& r : run.trace)
    out.push_back({r.t, r.P / L0, r.Lr / L0, r.V / V0, r.vt_minus / V0, r.vp_minus / V0, r.vt_plus / V0,
                   r.vp_plus / V0, r.Q / q});
  return out;
}

inline constexpr const char* kTraceHeader = "t_s,V_mps,Vt_minus,Vp_minus,Vt_plus,Vp_plus,R_m,R1_m,R0_m,Lr_m,P_m,Q_m3";
inline constexpr const char* kNormalizedHeader =
    "t_s,P_bar,Lr_bar,V_bar,Vt_minus_bar,Vp_minus_bar,Vt_plus_bar,Vp_plus_bar,Q_bar";

inline void write_termination(std::ostream& os, const JetRun& run) {
  os << "# termination,reason=" << to_string(run.reason) << ",steps=" << run.steps
     << ",halvings=" << run.rejected_steps << ",t_s=" << csv::number(run.final_state.time_s) << '\n';
}

inline void write_trace(std::ostream& os, const JetRun& run) {
  os << kTraceHeader << '\n';
  for (const auto& r : run.trace) {
    const double f[] = {r.t, r.V, r.vt_minus, r.vp_minus, r.vt_plus, r.vp_plus, r.R, r.R1, r.R0, r.Lr, r.P, r.Q};
    for (std::size_t i = 0; i < std::size(f); ++i) os << (i ? "," : "") << csv::number(f[i]);
    os << '\n';
  }
  write_termination(os, run);
}

inline void write_normalized(std::ostream& os, const JetRun& run) {
  os << kNormalizedHeader << '\n';
  for (const auto& r : normalized_trace(run)) {
    const double f[] = {r.t, r.P, r.Lr, r.V, r.vt_minus, r.vp_minus, r.vt_plus, r.vp_plus, r.Q};
    for (std::size_t i = 0; i < std::size(f); ++i) os << (i ? "," : "") << csv::number(f[i]);
    os << '\n';
  }
  write_termination(os, run);
}

}  // namespace armorsim::jet
