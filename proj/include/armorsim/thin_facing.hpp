#pragma once

// Perforation of a thin hard-steel facing by energy balance:
//
//   V_bl^2 = f * BH * h * d^2 / m,     V_rc = sqrt(V_0^2 - V_bl^2)
//
// with BH the raw Brinell number, h and d in metres and m in kilograms. The
// empirical factor f is fitted to shot series.

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "armorsim/csv.hpp"
#include "armorsim/error.hpp"
#include "armorsim/materials.hpp"

namespace armorsim::thin {

struct ShotRecord {
  double thickness_m = 0.0;
  double brinell = 0.0;
  double impact_velocity_mps = 0.0;
  std::optional<double> residual_velocity_mps;  // measured
};

struct PerforationResult {
  double ballistic_limit_mps = 0.0;
  double residual_velocity_mps = 0.0;
  double residual_diameter_m = 0.0;
  double residual_mass_kg = 0.0;
  bool perforated = false;
};

inline double ballistic_limit_sq(double factor, const ProjectileSpec& proj, const ThinFacingSpec& facing) {
  return factor * facing.brinell * facing.thickness_m * proj.diameter_m * proj.diameter_m / proj.mass_kg;
}

inline double require_factor(const ProjectileSpec& proj) {
  if (!proj.perforation_factor)
    throw InvalidInput("projectile '" + proj.name + "' has no thin-facing perforation factor");
  return *proj.perforation_factor;
}

inline double ballistic_limit(const ProjectileSpec& proj, const ThinFacingSpec& facing) {
  return std::sqrt(ballistic_limit_sq(require_factor(proj), proj, facing));
}

/// `retention` scales the exit mass (m_r = retention * m).
inline PerforationResult perforate_thin(const ProjectileSpec& proj, const ThinFacingSpec& facing,
                                        double impact_velocity_mps, double retention = 1.0) {
  if (!(impact_velocity_mps > 0.0)) throw InvalidInput("impact velocity must be positive");
  if (!(retention > 0.0) || retention > 1.6) throw InvalidInput("mass retention must lie in (0, 1.6]");
  const double vbl2 = ballistic_limit_sq(require_factor(proj), proj, facing);
  PerforationResult r;
  r.ballistic_limit_mps = std::sqrt(vbl2);
  r.residual_diameter_m = proj.residual_diameter_ratio * proj.diameter_m;
  r.residual_mass_kg = retention * proj.mass_kg;
  const double v02 = impact_velocity_mps * impact_velocity_mps;
  if (impact_velocity_mps > r.ballistic_limit_mps) {
    r.perforated = true;
    r.residual_velocity_mps = std::sqrt(std::max(0.0, v02 - vbl2));
  }
  return r;
}

struct FitRow {
  int series = 0;
  double impact_velocity_mps = 0.0;
  double measured_mps = 0.0;
  double calculated_mps = 0.0;
  double ratio = 0.0;  // measured / calculated
};

struct FitResult {
  double factor = 0.0;
  double objective = 0.0;  // sum of squared residual-velocity errors, (m/s)^2
  int iterations = 0;
  std::vector<FitRow> rows;
};

struct FitOptions {
  double lower = 1e6;
  double upper = 1e9;
  double rel_tol = 1e-12;
  int max_iterations = 400;
};

namespace detail {

inline double fit_objective(double factor, const std::vector<ShotRecord>& shots, const ProjectileSpec& proj) {
  double acc = 0.0;
  for (const auto& s : shots) {
    const double measured = *s.residual_velocity_mps;
    const double vbl2 = ballistic_limit_sq(factor, proj, {s.thickness_m, s.brinell});
    const double v02 = s.impact_velocity_mps * s.impact_velocity_mps;
    if (v02 <= vbl2) {
      acc += measured * measured;
    } else {
      const double e = std::sqrt(v02 - vbl2) - measured;
      acc += e * e;
    }
  }
  return acc;
}

}  // namespace detail

/// Least-squares fit of f by golden-section search over log(f) on the bracket.
inline FitResult fit_factor(const std::vector<ShotRecord>& shots, const ProjectileSpec& proj,
                            const FitOptions& opt = {}) {
  std::vector<ShotRecord> usable;
  for (const auto& s : shots) {
    if (!s.residual_velocity_mps) continue;
    if (!(s.impact_velocity_mps > 0.0) || *s.residual_velocity_mps < 0.0 ||
        *s.residual_velocity_mps >= s.impact_velocity_mps)
      throw InvalidInput("shot record violates 0 <= V_r < V_0");
    usable.push_back(s);
  }
  if (usable.size() < 2)
    throw InsufficientData("fit needs at least 2 shot records with measured residual velocity, got " +
                           std::to_string(usable.size()));

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(opt.lower), b = std::log(opt.upper);
  auto objective = [&](double x) { return detail::fit_objective(std::exp(x), usable, proj); };
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  int it = 0;
  while (b - a > opt.rel_tol && it < opt.max_iterations) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    ++it;
  }
  const double x = 0.5 * (a + b);
  const double edge = 1e-6 * (std::log(opt.upper) - std::log(opt.lower));
  if (x - std::log(opt.lower) < edge || std::log(opt.upper) - x < edge)
    throw ConvergenceError("fit objective has no interior minimum on [" + csv::number(opt.lower) + ", " +
                           csv::number(opt.upper) + "]");

  FitResult res;
  res.factor = std::exp(x);
  res.objective = objective(x);
  res.iterations = it;
  ProjectileSpec fitted = proj;
  fitted.perforation_factor = res.factor;
  int series = 1;
  for (const auto& s : usable) {
    FitRow row;
    row.series = series++;
    row.impact_velocity_mps = s.impact_velocity_mps;
    row.measured_mps = *s.residual_velocity_mps;
    row.calculated_mps = perforate_thin(fitted, {s.thickness_m, s.brinell}, s.impact_velocity_mps)
                             .residual_velocity_mps;
    row.ratio = row.calculated_mps > 0.0 ? row.measured_mps / row.calculated_mps : kInfinity;
    res.rows.push_back(row);
  }
  return res;
}

// ---------------------------------------------------------------------------
// File formats

inline constexpr const char* kShotHeader = "h_m,BH,V0_mps,Vr_mps";
inline constexpr const char* kFitHeader = "series,V0,Vr_meas,Vrc_calc,ratio";

inline std::vector<ShotRecord> parse_shots(const csv::Table& t) {
  if (csv::join(t.header) != kShotHeader)
    throw InvalidInput(std::string("shot file header must be '") + kShotHeader + "', got '" +
                       csv::join(t.header) + "'");
  std::vector<ShotRecord> out;
  int line = 1;
  for (const auto& row : t.rows) {
    ++line;
    if (row.size() != 4) throw InvalidInput("shot file row " + std::to_string(line) + ": expected 4 fields");
    ShotRecord s;
    const std::string where = "shot row " + std::to_string(line);
    s.thickness_m = csv::parse_number(row[0], where);
    s.brinell = csv::parse_number(row[1], where);
    s.impact_velocity_mps = csv::parse_number(row[2], where);
    if (!row[3].empty()) s.residual_velocity_mps = csv::parse_number(row[3], where);
    out.push_back(s);
  }
  return out;
}

inline std::vector<ShotRecord> read_shots(const std::string& path) { return parse_shots(csv::read_file(path)); }

inline void write_fit_report(std::ostream& os, const FitResult& r) {
  os << kFitHeader << '\n';
  for (const auto& row : r.rows)
    os << row.series << ',' << csv::number(row.impact_velocity_mps) << ',' << csv::number(row.measured_mps)
       << ',' << csv::number(row.calculated_mps) << ',' << csv::number(row.ratio) << '\n';
}

/// The seven M-16 shot series against steel plates (thickness, Brinell
/// hardness, impact and measured residual velocity).
inline std::vector<ShotRecord> m16_shot_series() {
  return {{0.0082, 505, 1012, 391}, {0.0060, 505, 998, 639}, {0.0048, 525, 970, 624},
          {0.0045, 700, 967, 471},  {0.0041, 595, 971, 628}, {0.0032, 595, 969, 742},
          {0.0029, 595, 973, 802}};
}

/// Residual velocities calculated with f = 2.47e7 as published with the series.
inline std::vector<double> m16_published_calculated() { return {383, 596, 655, 503, 652, 732, 762}; }

}  // namespace armorsim::thin
