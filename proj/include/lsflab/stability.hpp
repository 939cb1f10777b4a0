#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsflab/arrival.hpp"
#include "lsflab/shapes.hpp"
#include "lsflab/singular.hpp"

namespace lsflab {

struct ExperimentPlan {
  ShapeSpec base;
  std::vector<PerturbationSpec> perturbations;  ///< strictly decreasing amplitudes
  SolveConfig solve;
  double h = 1.0 / 32.0;
  double delta_neighborhood = 0.0;  ///< 0 selects max(6h, 0.1 * min component separation)
  std::vector<double> snapshot_times;
  double cap_flux_margin = 0.1;

  /// Throws ConfigError.
  void validate() const;
};

enum class Match { yes, no, not_applicable };
std::string to_string(Match m);

struct StabilityRow {
  double amplitude = 0.0;
  bool failed = false;
  std::string failure;
  double sup_u_gap = 0.0;
  double sup_grad_gap_offS = 0.0;
  double extinction_gap = 0.0;
  double extinction_time = 0.0;
  bool containment_pass = true;
  std::vector<Match> type_match;  ///< one entry per baseline component
  std::map<std::string, bool> proxies;
  double cap_flux_min = 1.0;  ///< min of grad u . nu / |grad u| over cap nodes
  int perturbed_components = 0;
};

struct StabilityReport {
  ShapeSpec base;
  double h = 0.0;
  double delta = 0.0;
  double baseline_extinction_time = 0.0;
  std::vector<SingularComponent> baseline_components;
  std::vector<StabilityRow> rows;  ///< amplitude descending
};

/// Baseline solve, then one row per perturbation.
StabilityReport run_experiment(const ExperimentPlan& plan);

/// One row against an already analyzed baseline. Exposed for tests.
StabilityRow compare_runs(const ScalarField& u_base, const SingularAnalysis& base,
                          const ArrivalResult& perturbed, double amplitude, double delta,
                          double cap_flux_margin);

/// Distance from x to the nearest point of any baseline component.
double distance_to_singular_set(const Vec3& x, const std::vector<SingularComponent>& comps);

/// max(6h, 0.1 * min separation of components). Throws ConfigError if the
/// delta-neighborhoods of distinct components overlap.
double default_delta(const std::vector<SingularComponent>& comps, double h, double requested);

struct RegularIntervalResult {
  double gap = 0.0;  ///< max sampled Hausdorff distance over the tested levels
  std::vector<double> levels;
  int perturbed_critical_in_interval = 0;
};

/// Level sets {u = t} for t in [a, b] (the given times inside the interval,
/// or five evenly spaced levels when none are given). Throws
/// PreconditionError when [a, b] contains a baseline singular time.
RegularIntervalResult regular_interval_check(const ScalarField& base, const ScalarField& perturbed,
                                             double a, double b,
                                             const std::vector<SingularComponent>& base_components,
                                             const std::vector<SingularComponent>& pert_components,
                                             const std::vector<double>& times = {});

/// Projected points of the level set {u = t}.
std::vector<Vec3> level_set_points(const ScalarField& u, double t);

/// Symmetric sampled Hausdorff distance between two point clouds.
double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// Hausdorff distance between {a = t} and {b = t}: the level-set points of
/// each field against the other cloud, tightened by Newton projection onto
/// the other level set. Free of the sampling floor of hausdorff_distance.
double level_set_hausdorff(const ScalarField& a, const ScalarField& b, double t);

}  // namespace lsflab
