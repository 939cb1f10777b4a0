#include "lsflab/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lsflab/arrival.hpp"
#include "lsflab/metrics.hpp"
#include "lsflab/redistance.hpp"
#include "lsflab/serialize.hpp"
#include "lsflab/shapes.hpp"
#include "lsflab/singular.hpp"
#include "lsflab/stability.hpp"

namespace fs = std::filesystem;

namespace lsflab::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct ShapeArgs {
  std::string shape = "sphere";
  std::string config_file;
  std::vector<std::string> params;
  double h = 1.0 / 32.0;
};

struct RunArgs {
  int threads = 0;
  std::uint64_t seed = 0x5eed5eedULL;
  std::string backend = "openmp";
};

void add_shape_options(CLI::App* app, ShapeArgs& s) {
  app->add_option("--shape", s.shape, "preset name")->capture_default_str();
  app->add_option("--config", s.config_file, "shape config file (key=value lines)");
  app->add_option("--param", s.params, "shape parameter override k=v (repeatable)");
  app->add_option("--h", s.h, "grid spacing")->capture_default_str();
}

void add_run_options(CLI::App* app, RunArgs& r) {
  app->add_option("--threads", r.threads, "OpenMP threads (fallback: LSFLAB_THREADS)");
  app->add_option("--seed", r.seed, "seed of the probe jitter")->capture_default_str();
  app->add_option("--backend", r.backend, "kernel backend: openmp | reference")
      ->capture_default_str();
}

ShapeSpec build_shape(const ShapeArgs& a) {
  ShapeSpec spec;
  if (!a.config_file.empty()) {
    std::ifstream f(a.config_file);
    if (!f) throw ConfigError("cannot read shape config " + a.config_file);
    std::stringstream ss;
    ss << f.rdbuf();
    spec = parse_shape_config(ss.str());
  } else {
    spec = preset(a.shape);
  }
  for (const auto& kv : a.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects k=v, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(val.c_str(), &end);
    if (val.empty() || *end != '\0') throw ConfigError("--param " + key + ": not a number");
    spec.params[key] = v;
  }
  spec.validate();
  if (!(a.h > 0.0) || !std::isfinite(a.h)) throw ConfigError("--h must be positive");
  return spec;
}

kernels::Backend apply_run_args(const RunArgs& r) {
  int threads = r.threads;
  if (threads == 0) {
    if (const char* env = std::getenv("LSFLAB_THREADS"); env && *env) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*end != '\0') throw ConfigError("LSFLAB_THREADS must be an integer");
      threads = static_cast<int>(v);
      if (threads < 1) throw ConfigError("LSFLAB_THREADS must be >= 1");
    }
  } else if (threads < 0) {
    throw ConfigError("--threads must be >= 1");
  }
  if (threads > 0) omp_set_num_threads(threads);
  if (r.backend == "openmp") return kernels::Backend::openmp;
  if (r.backend == "reference") return kernels::Backend::reference;
  throw ConfigError("unknown backend '" + r.backend + "'");
}

Json run_json(const RunArgs& r) {
  return {{"threads", r.threads}, {"seed", r.seed}, {"backend", r.backend}};
}

Json grid_json(const UniformGrid& g) {
  return {{"dims", g.dims()}, {"origin", to_json(g.origin())}, {"h", g.h()}};
}

Json versions_json() {
  return {{"tool", kToolVersion}, {"lsf1", kLsf1Version}, {"schema", kSchemaVersion}};
}

/// Diagnostics without wallclock entries, which go to timing.json.
Json diagnostics_json(const std::map<std::string, double>& d, Json& timing, const std::string& prefix) {
  Json out = Json::object();
  for (const auto& [k, v] : d) {
    if (k.find("wallclock") != std::string::npos) {
      timing[prefix + "." + k] = v;
    } else {
      out[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
    }
  }
  return out;
}

std::string contour_rows(const std::string& method, double t, const std::vector<Vec3>& pts,
                         double h) {
  std::string rows;
  char buf[160];
  for (const auto& p : pts) {
    if (std::abs(p.y()) > 0.5 * h) continue;
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g\n", method.c_str(), t, p.x(), p.y(),
                  p.z());
    rows += buf;
  }
  return rows;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  ShapeArgs shape;
  RunArgs run;
  std::string method = "parabolic";
  std::vector<double> eps_schedule;
  std::vector<double> snapshots;
  double cfl = 0.5;
  long max_steps = 0;
  std::string out;
};

int cmd_solve(const SolveArgs& a, const std::vector<std::string>& argv, std::ostream& out,
              std::ostream& err) {
  const auto t_start = Clock::now();
  const ShapeSpec spec = build_shape(a.shape);
  SolveConfig cfg;
  cfg.backend = apply_run_args(a.run);
  cfg.method = solve_method_from_string(a.method);
  cfg.cfl = a.cfl;
  if (!a.eps_schedule.empty()) cfg.epsilon_schedule = a.eps_schedule;
  cfg.snapshot_times = a.snapshots;
  if (a.max_steps > 0) cfg.max_steps = a.max_steps;
  cfg.validate();
  if (a.out.empty()) throw ConfigError("--out is required");

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const UniformGrid grid = default_grid(spec, a.shape.h);
  const ScalarField initial = generate_sdf(spec, grid);

  Json timing = Json::object();
  Json artifacts = Json::array();
  Json results = Json::object();
  auto add_artifact = [&](const std::string& name, const std::string& kind, bool partial) {
    artifacts.push_back({{"path", name}, {"kind", kind}, {"partial", partial}});
  };

  write_lsf1(dir / "initial.lsf1", initial);
  add_artifact("initial.lsf1", "initial_sdf", false);
  timing["setup_s"] = seconds_since(t_start);

  std::vector<std::pair<std::string, SolveMethod>> runs;
  if (cfg.method == SolveMethod::parabolic || cfg.method == SolveMethod::both) {
    runs.emplace_back("parabolic", SolveMethod::parabolic);
  }
  if (cfg.method == SolveMethod::elliptic_regularized || cfg.method == SolveMethod::both) {
    runs.emplace_back("elliptic", SolveMethod::elliptic_regularized);
  }

  bool failed = false;
  std::string contours = "method,t,x,y,z\n";
  std::map<std::string, ScalarField> fields;
  for (const auto& [name, method] : runs) {
    const auto t0 = Clock::now();
    Json entry;
    try {
      const ArrivalResult res = method == SolveMethod::parabolic
                                    ? solve_parabolic(initial, cfg)
                                    : solve_elliptic_regularized(initial, cfg);
      const std::string file = "u_" + name + ".lsf1";
      write_lsf1(dir / file, res.u);
      add_artifact(file, "arrival_time", !res.complete);
      entry = {{"status", res.complete ? "ok" : "incomplete"},
               {"file", file},
               {"extinction_time", res.extinction_time},
               {"complete", res.complete},
               {"diagnostics", diagnostics_json(res.diagnostics, timing, name)},
               {"warnings", res.warnings}};
      if (!res.complete) failed = true;
      Json snaps = Json::array();
      for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "snapshot_%s_%03zu.lsf1", name.c_str(), i);
        write_lsf1(dir / buf, res.snapshots[i].psi);
        add_artifact(buf, "snapshot", !res.complete);
        snaps.push_back({{"t", res.snapshots[i].t}, {"file", buf}});
      }
      entry["snapshots"] = snaps;
      Json per_eps = Json::array();
      for (const auto& [eps, ue] : res.per_epsilon) {
        per_eps.push_back({{"epsilon", eps}, {"extinction_time", extinction_time(ue)}});
      }
      if (!per_eps.empty()) entry["per_epsilon"] = per_eps;
      for (double t : cfg.snapshot_times) {
        const auto pts = t > 0.0 ? level_set_points(res.u, t) : level_set_points(initial, 0.0);
        contours += contour_rows(name, t, pts, grid.h());
      }
      fields.emplace(name, res.u);
      out << name << ": extinction_time " << res.extinction_time << "\n";
    } catch (const NumericalError& e) {
      failed = true;
      entry = {{"status", "failed"}, {"error", e.what()}};
      err << name << " solver failed: " << e.what() << "\n";
    }
    results[name] = entry;
    timing[name + "_s"] = seconds_since(t0);
  }
  if (fields.size() == 2) {
    results["cross_method_sup_diff"] = max_abs_diff(fields.at("parabolic"), fields.at("elliptic"));
  }
  if (!cfg.snapshot_times.empty()) {
    write_text(dir / "contours.csv", contours);
    add_artifact("contours.csv", "contours", failed);
  }

  Json manifest = {{"schema_version", kSchemaVersion},
                   {"command", "solve"},
                   {"argv", argv},
                   {"status", failed ? "failed" : "ok"},
                   {"config",
                    {{"shape", to_json(spec)},
                     {"h", a.shape.h},
                     {"grid", grid_json(grid)},
                     {"solve", to_json(cfg)},
                     {"run", run_json(a.run)}}},
                   {"versions", versions_json()},
                   {"results", results},
                   {"artifacts", artifacts},
                   {"timing_file", "timing.json"}};
  timing["total_s"] = seconds_since(t_start);
  write_json(dir / "timing.json", timing);
  write_json(dir / "manifest.json", manifest);
  return failed ? kNumericalFailure : kOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string dir;
  RunArgs run;
  double entropy_slack = 0.05;
};

struct Loaded {
  std::string method;
  std::string file;
  double dt = 0.0;
  Json snapshots = Json::array();
};

Loaded pick_arrival(const Json& manifest, const fs::path& dir) {
  const Json& results = manifest.contains("results") ? manifest["results"] : Json::object();
  for (const char* name : {"parabolic", "elliptic"}) {
    if (!results.contains(name)) continue;
    const Json& r = results[name];
    if (!r.contains("file") || !fs::exists(dir / r["file"].get<std::string>())) continue;
    Loaded l;
    l.method = name;
    l.file = r["file"].get<std::string>();
    if (r.contains("diagnostics") && r["diagnostics"].contains("dt") && r["diagnostics"]["dt"].is_number()) {
      l.dt = r["diagnostics"]["dt"].get<double>();
    }
    if (r.contains("snapshots")) l.snapshots = r["snapshots"];
    return l;
  }
  throw ConfigError("run directory has no arrival-time field");
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto t_start = Clock::now();
  apply_run_args(a.run);
  const fs::path dir(a.dir);
  if (!fs::exists(dir / "manifest.json")) throw ConfigError("no manifest.json in " + dir.string());
  const Json manifest = read_json(dir / "manifest.json");
  if (!fs::exists(dir / "initial.lsf1")) throw ConfigError("missing initial.lsf1 in " + dir.string());
  const Loaded src = pick_arrival(manifest, dir);
  const ScalarField initial = read_lsf1(dir / "initial.lsf1");
  const ScalarField u = read_lsf1(dir / src.file);
  if (!(u.grid == initial.grid)) throw ConfigError("grid mismatch between initial and arrival field");
  std::optional<ShapeSpec> shape;
  try {
    shape = shape_from_json(manifest.at("config").at("shape"));
  } catch (const std::exception&) {
    shape.reset();
  }
  const double h = u.grid.h();
  Json timing = Json::object();

  auto t0 = Clock::now();
  SingularThresholds th = default_thresholds(u, src.dt);
  th.seed = a.run.seed;
  const SingularAnalysis analysis = analyze_singular_set(u, th);
  timing["singular_s"] = seconds_since(t0);
  write_json(dir / "components.json", {{"schema_version", kSchemaVersion},
                                       {"source", src.file},
                                       {"thresholds", to_json(th)},
                                       {"components", components_json(analysis.components)}});

  t0 = Clock::now();
  const MetricsReport metrics = compute_metrics(initial);
  timing["metrics_s"] = seconds_since(t0);
  write_json(dir / "metrics.json", {{"schema_version", kSchemaVersion},
                                    {"source", "initial.lsf1"},
                                    {"metrics", to_json(metrics)}});

  t0 = Clock::now();
  const double T_ext = extinction_time(u);
  bool all_pass = true;
  Json checks = Json::object();

  {
    const double g = max_gradient_norm(u);
    const double bound = 1.0 / metrics.min_H + 10.0 * h;
    const bool pass = g <= bound;
    all_pass = all_pass && pass;
    checks["gradient_bound"] = {{"max_grad", g}, {"bound", bound}, {"pass", pass}};
  }
  {
    Json rows = Json::array();
    bool pass_all = true;
    for (double frac : {0.2, 0.4}) {
      const double T = frac * T_ext;
      const double d = clearing_distance(u, initial, T);
      const double need = metrics.min_H * T - 3.0 * h;
      const bool pass = d >= need;
      pass_all = pass_all && pass;
      rows.push_back({{"T", T}, {"distance", d}, {"required", need}, {"pass", pass}});
    }
    all_pass = all_pass && pass_all;
    checks["clearing_distance"] = {{"kappa", metrics.min_H}, {"slack", 3.0 * h}, {"levels", rows}, {"pass", pass_all}};
  }
  {
    // Snapshot fields when the run has them, level sets of u otherwise.
    std::vector<std::pair<double, ScalarField>> seq;
    std::string source = "snapshots";
    seq.emplace_back(0.0, initial);
    for (const auto& s : src.snapshots) {
      const double t = s.at("t").get<double>();
      const fs::path p = dir / s.at("file").get<std::string>();
      if (t > 0.0 && fs::exists(p)) seq.emplace_back(t, read_lsf1(p));
    }
    if (seq.size() == 1) {
      source = "arrival_levels";
      for (double frac : {0.25, 0.5, 0.75}) {
        ScalarField f(u.grid);
        const double t = frac * T_ext;
        for (std::size_t i = 0; i < f.values.size(); ++i) f[i] = t - u[i];
        seq.emplace_back(t, redistance(f, 1.0));
      }
    }
    Json rows = Json::array();
    bool pass = true;
    double running_min = std::numeric_limits<double>::infinity();
    for (const auto& [t, f] : seq) {
      try {
        const double e = field_entropy(f, 200, 2, true).value;
        const bool ok = e <= running_min + a.entropy_slack;
        pass = pass && ok;
        running_min = std::min(running_min, e);
        rows.push_back({{"t", t}, {"entropy", e}, {"ok", ok}});
      } catch (const Error& ex) {
        rows.push_back({{"t", t}, {"entropy", nullptr}, {"error", ex.what()}});
      }
    }
    all_pass = all_pass && pass;
    checks["entropy_monotonicity"] = {{"source", source}, {"slack", a.entropy_slack}, {"sequence", rows}, {"pass", pass}};
  }
  {
    Json rows = Json::array();
    bool pass = true;
    for (std::size_t c = 0; c < analysis.components.size(); ++c) {
      for (const auto& p : analysis.components[c].points) {
        if (p.kind != PointKind::cylindrical || p.critical_type == CriticalType::local_max) continue;
        double r = 3.0 * std::sqrt(2.0 * p.time);
        std::string r_source = "cylinder_radius";
        if (shape && shape->params.count("neck_radius")) {
          r = 3.0 * shape->params.at("neck_radius");
          r_source = "neck_radius";
        }
        Json row = {{"component", c}, {"position", to_json(p.position)}, {"phi_deg", 30.0}, {"r", r}, {"r_source", r_source}};
        try {
          const ConeResult cr = cone_containment(u, p, std::numbers::pi / 6.0, r);
          row["pass"] = cr.pass;
          row["worst_excess"] = cr.worst_excess;
          row["nodes_checked"] = cr.nodes_checked;
          pass = pass && cr.pass;
        } catch (const Error& ex) {
          row["pass"] = false;
          row["error"] = ex.what();
          pass = false;
        }
        rows.push_back(row);
      }
    }
    all_pass = all_pass && pass;
    checks["cone_containment"] = {{"saddles", rows}, {"pass", pass}};
  }
  {
    Json rows = Json::array();
    bool pass = true;
    for (std::size_t c = 0; c < analysis.components.size(); ++c) {
      const auto& comp = analysis.components[c];
      Json row = {{"component", c}, {"type", to_string(comp.component_type)}};
      try {
        const double dt = default_split_dt(u, comp, th.tol_time);
        const double r_hat = component_scale(u, comp, h);
        const int count = splitting_check(u, comp, dt, r_hat);
        row["dt"] = dt;
        row["r_hat"] = r_hat;
        row["count"] = count;
        int expected = -1;
        switch (comp.component_type) {
          case ComponentType::vanishing: expected = 0; break;
          case ComponentType::splitting: expected = 2; break;
          case ComponentType::bumpy: expected = 1; break;
          case ComponentType::unknown: break;
        }
        if (expected >= 0) {
          row["expected"] = expected;
          row["pass"] = count == expected;
          pass = pass && count == expected;
        } else {
          row["expected"] = nullptr;
          row["pass"] = nullptr;
        }
      } catch (const Error& ex) {
        row["error"] = ex.what();
        row["pass"] = false;
        pass = false;
      }
      rows.push_back(row);
    }
    all_pass = all_pass && pass;
    checks["splitting_counts"] = {{"components", rows}, {"pass", pass}};
  }
  timing["checks_s"] = seconds_since(t0);
  Json doc = {{"schema_version", kSchemaVersion}, {"source", src.file}, {"all_pass", all_pass}};
  doc.update(checks);
  write_json(dir / "checks.json", doc);

  timing["total_s"] = seconds_since(t_start);
  write_json(dir / "analyze_timing.json", timing);
  out << analysis.components.size() << " singular component(s)";
  for (const auto& c : analysis.components) {
    out << "; " << to_string(c.component_type) << " " << to_string(c.geometry) << " at t=" << c.time;
  }
  out << "\nchecks: " << (all_pass ? "all pass" : "some fail") << "\n";
  return kOk;
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  ShapeArgs shape;
  RunArgs run;
  std::vector<double> amplitudes;
  std::string mode = "normal_bump";
  int frequency = 2;
  double phase = 0.0;
  double delta = 0.0;
  std::string out;
};

int cmd_perturb(const PerturbArgs& a, const std::vector<std::string>& argv, std::ostream& out,
                std::ostream& err) {
  const auto t_start = Clock::now();
  ExperimentPlan plan;
  plan.base = build_shape(a.shape);
  plan.solve.backend = apply_run_args(a.run);
  plan.h = a.shape.h;
  plan.delta_neighborhood = a.delta;
  const PerturbationMode mode = perturbation_mode_from_string(a.mode);
  for (double amp : a.amplitudes) {
    PerturbationSpec p;
    p.amplitude = amp;
    p.mode = mode;
    p.frequency = a.frequency;
    p.phase = a.phase;
    plan.perturbations.push_back(p);
  }
  plan.validate();
  if (a.out.empty()) throw ConfigError("--out is required");
  const fs::path dir(a.out);
  fs::create_directories(dir);

  Json perts = Json::array();
  for (const auto& p : plan.perturbations) perts.push_back(to_json(p));
  Json manifest = {{"schema_version", kSchemaVersion},
                   {"command", "perturb"},
                   {"argv", argv},
                   {"status", "ok"},
                   {"config",
                    {{"shape", to_json(plan.base)},
                     {"h", plan.h},
                     {"delta_requested", plan.delta_neighborhood},
                     {"perturbations", perts},
                     {"solve", to_json(plan.solve)},
                     {"run", run_json(a.run)}}},
                   {"versions", versions_json()},
                   {"timing_file", "timing.json"}};
  Json timing = Json::object();
  StabilityReport report;
  try {
    report = run_experiment(plan);
  } catch (const NumericalError& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    manifest["artifacts"] = Json::array();
    timing["total_s"] = seconds_since(t_start);
    write_json(dir / "timing.json", timing);
    write_json(dir / "manifest.json", manifest);
    err << "baseline failed: " << e.what() << "\n";
    return kNumericalFailure;
  }
  bool failed = false;
  for (const auto& r : report.rows) failed = failed || r.failed;
  write_json(dir / "stability.json", to_json(report));
  write_text(dir / "stability.csv", stability_csv(report));
  manifest["status"] = failed ? "failed" : "ok";
  manifest["artifacts"] = Json::array({{{"path", "stability.json"}, {"kind", "stability_report"}, {"partial", failed}},
                                       {{"path", "stability.csv"}, {"kind", "gap_vs_amplitude"}, {"partial", failed}}});
  timing["total_s"] = seconds_since(t_start);
  write_json(dir / "timing.json", timing);
  write_json(dir / "manifest.json", manifest);
  for (const auto& r : report.rows) {
    out << "amplitude " << r.amplitude << ": sup_u_gap " << r.sup_u_gap << ", extinction_gap "
        << r.extinction_gap << (r.failed ? " (failed: " + r.failure + ")" : "") << "\n";
  }
  return failed ? kNumericalFailure : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level-set flow laboratory"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "compute the arrival-time field");
  add_shape_options(solve, sa.shape);
  add_run_options(solve, sa.run);
  solve->add_option("--method", sa.method, "parabolic | elliptic | both")->capture_default_str();
  solve->add_option("--eps-schedule", sa.eps_schedule, "decreasing epsilon list")->delimiter(',');
  solve->add_option("--snapshots", sa.snapshots, "snapshot times t1,t2,...")->delimiter(',');
  solve->add_option("--cfl", sa.cfl, "time step factor in (0, 0.5]")->capture_default_str();
  solve->add_option("--max-steps", sa.max_steps, "step cap of the parabolic solver");
  solve->add_option("--out", sa.out, "output directory")->required();

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "singular set, metrics and checks of a run");
  analyze->add_option("dir", aa.dir, "run directory")->required();
  add_run_options(analyze, aa.run);
  analyze->add_option("--entropy-slack", aa.entropy_slack)->capture_default_str();

  PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "stability experiment");
  add_shape_options(perturb, pa.shape);
  add_run_options(perturb, pa.run);
  perturb->add_option("--amplitudes", pa.amplitudes, "strictly decreasing list")
      ->delimiter(',')
      ->required();
  perturb->add_option("--mode", pa.mode, "normal_bump | wobble")->capture_default_str();
  perturb->add_option("--frequency", pa.frequency)->capture_default_str();
  perturb->add_option("--phase", pa.phase)->capture_default_str();
  perturb->add_option("--delta", pa.delta, "containment neighborhood (0: default)");
  perturb->add_option("--out", pa.out, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*solve) return cmd_solve(sa, args, out, err);
    if (*analyze) return cmd_analyze(aa, out);
    return cmd_perturb(pa, args, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace lsflab::cli
