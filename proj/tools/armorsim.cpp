// Command-line front end: run, sweep, fit, validate.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "armorsim/armorsim.hpp"

namespace fs = std::filesystem;
using namespace armorsim;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kValidation = 4 };

struct Globals {
  std::string output_dir = "out";
  double dt = 0.0;
  bool seedless = false;
  std::string json;
};

struct Range {
  double start, stop, step;
};

Range parse_range(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("range", "'" + text + "' is not start:stop:step");
    }
  }
  if (v.size() != 3) throw ConfigError("range", "'" + text + "' is not start:stop:step");
  if (!(v[2] > 0.0)) throw ConfigError("range", "step must be positive");
  if (v[1] < v[0]) throw ConfigError("range", "'" + text + "' is empty");
  return {v[0], v[1], v[2]};
}

std::vector<double> expand(const Range& r) {
  std::vector<double> out;
  const long n = long(std::floor((r.stop - r.start) / r.step * (1 + 1e-12))) + 1;
  for (long i = 0; i < n; ++i) out.push_back(r.start + double(i) * r.step);
  return out;
}

void emit_json(const std::string& target, const std::string& text) {
  if (target.empty()) return;
  if (target == "-")
    std::cout << text;
  else
    report::write_text(target, text);
}

Scenario load(const std::string& path, const Globals& g) {
  Scenario s = config::load_scenario(path);
  if (g.dt > 0.0) s.jet.dt = g.dt;
  return s;
}

int cmd_run(const std::string& path, const Globals& g) {
  const Scenario s = load(path, g);
  const auto rep = run_scenario(s);
  const auto files = report::write_artifacts(rep, g.output_dir);
  std::printf("%s: %s\n", s.name.c_str(), to_string(rep.outcome));
  if (rep.handoff)
    std::printf("  handoff V=%.6g m/s m=%.6g kg d=%.6g m\n", rep.handoff->velocity_mps, rep.handoff->mass_kg,
                rep.handoff->diameter_m);
  if (rep.backing)
    std::printf("  backing Np*=%d/%d Vr=%.6g m/s P=%.6g m Wc=%.6g J\n", rep.backing->perforated_plies,
                rep.backing->ply_count, rep.backing->residual_velocity_mps, rep.backing->depth_m,
                rep.backing->absorbed_energy_J);
  std::printf("  %zu files written to %s\n", files.size(), g.output_dir.c_str());
  emit_json(g.json, report::dump(report::to_json(rep)));
  return kOk;
}

int cmd_sweep(const std::string& path, const std::string& plies, const std::string& velocity, int workers,
              const Globals& g) {
  if (plies.empty() == velocity.empty()) throw ConfigError("sweep", "give exactly one of --plies or --velocity");
  const Range range = parse_range(plies.empty() ? velocity : plies);
  Scenario s = load(path, g);
  if (workers > 0) s.workers = workers;

  std::vector<SweepPoint> points;
  if (!plies.empty()) {
    std::vector<int> counts;
    for (double v : expand(range)) {
      if (v != std::floor(v)) throw ConfigError("plies", "ply counts must be integers");
      counts.push_back(int(v));
    }
    try {
      points = ply_count_sweep(s, counts);
    } catch (const InvalidInput& e) {
      throw ConfigError("plies", e.what());
    }
  } else {
    points = velocity_sweep(s, expand(range));
  }

  fs::create_directories(g.output_dir);
  const std::string table = report::sweep_csv(points, !plies.empty());
  report::write_text(fs::path(g.output_dir) / "sweep.csv", table);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!p.report || !p.report->jet || velocity.empty()) continue;
    char name[48];
    std::snprintf(name, sizeof name, "facing_normalized_%03zu.csv", i);
    std::ostringstream os;
    jet::write_normalized(os, *p.report->jet);
    report::write_text(fs::path(g.output_dir) / name, os.str());
  }
  std::cout << table;
  if (!g.json.empty()) {
    report::ojson arr = report::ojson::array();
    for (const auto& p : points)
      arr.push_back({{"value", p.value},
                     {"error", p.error},
                     {"report", p.report ? report::to_json(*p.report) : report::ojson(nullptr)}});
    emit_json(g.json, report::dump(arr));
  }
  return kOk;
}

int cmd_fit(const std::string& shots_path, const std::string& projectile, const Globals& g) {
  std::vector<thin::ShotRecord> shots;
  try {
    shots = thin::read_shots(shots_path);
  } catch (const InvalidInput& e) {
    throw ConfigError(shots_path, e.what());
  }
  const auto fit = thin::fit_factor(shots, catalog_projectile(projectile));
  std::printf("f = %.6e\n", fit.factor);
  thin::write_fit_report(std::cout, fit);
  if (!g.json.empty()) {
    report::ojson rows = report::ojson::array();
    for (const auto& r : fit.rows)
      rows.push_back({{"series", r.series},
                      {"V0_mps", r.impact_velocity_mps},
                      {"Vr_meas_mps", r.measured_mps},
                      {"Vrc_calc_mps", r.calculated_mps},
                      {"ratio", r.ratio}});
    emit_json(g.json, report::dump({{"projectile", projectile},
                                    {"factor", fit.factor},
                                    {"objective", fit.objective},
                                    {"rows", rows}}));
  }
  return kOk;
}

int cmd_validate(const std::vector<std::string>& only, int workers, const Globals& g) {
  validation::Options opt;
  opt.only = only;
  opt.workers = workers;
  const auto suite = validation::validation_suite(opt);
  for (const auto& c : suite.checks) std::cout << validation::format_line(c) << '\n';
  emit_json(g.json, report::dump(validation::to_json(suite)));
  return suite.passed() ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered armour penetration simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--output-dir", g.output_dir, "Directory for artifacts");
  app.add_option("--dt", g.dt, "Jet-model time step override (s)")->check(CLI::PositiveNumber);
  app.add_flag("--seedless", g.seedless, "Assert that no random number generator takes part in the run");
  app.add_option("--json", g.json, "Write machine-readable results to this file ('-' for stdout)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config_path, "Scenario file")->required();

  std::string plies, velocity;
  int workers = 0;
  auto* sweep = app.add_subcommand("sweep", "Sweep ply count or impact velocity");
  sweep->add_option("config", config_path, "Scenario file")->required();
  sweep->add_option("--plies", plies, "Ply counts start:stop:step");
  sweep->add_option("--velocity", velocity, "Impact velocities start:stop:step (m/s)");
  sweep->add_option("--workers", workers, "Worker threads (default: available cores)");

  std::string shots, projectile;
  auto* fit = app.add_subcommand("fit", "Fit the thin-plate perforation factor");
  fit->add_option("shots", shots, "Shot CSV (h_m,BH,V0_mps,Vr_mps)")->required();
  fit->add_option("projectile", projectile, "Catalog projectile")->required();

  std::vector<std::string> only;
  auto* validate = app.add_subcommand("validate", "Run the built-in acceptance checks");
  validate->add_option("--only", only, "Check ids to run")->delimiter(',');
  validate->add_option("--workers", workers, "Worker threads (default: available cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (g.seedless && kUsesRandomness) {
    std::cerr << "error: --seedless requested but a random number generator is linked\n";
    return kConfig;
  }

  try {
    if (*run) return cmd_run(config_path, g);
    if (*sweep) return cmd_sweep(config_path, plies, velocity, workers, g);
    if (*fit) return cmd_fit(shots, projectile, g);
    if (*validate) return cmd_validate(only, workers, g);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const InsufficientData& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const UnknownName& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const StageError& e) {
    std::cerr << "solver error in stage " << e.stage() << ": " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
