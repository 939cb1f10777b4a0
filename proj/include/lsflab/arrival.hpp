#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsflab/grid.hpp"
#include "lsflab/kernels.hpp"

namespace lsflab {

/// Ambient dimension of every grid in the library.
inline constexpr int kDim = 3;

enum class SolveMethod { parabolic, elliptic_regularized, both };

std::string to_string(SolveMethod m);
SolveMethod solve_method_from_string(const std::string& s);

struct SolveConfig {
  SolveMethod method = SolveMethod::parabolic;
  double cfl = 0.5;  ///< dt = cfl h^2 / (2n), cfl in (0, 0.5]
  std::vector<double> epsilon_schedule{0.2, 0.1, 0.05};
  int max_newton_iters = 30;
  double residual_tol = 1e-7;
  int reinit_every = 10;
  int reinit_iters = 5;
  double band_halfwidth = 6.0;  ///< in units of h
  double reinit_keep = 3.0;     ///< nodes with |psi| below this (units of h) are not reinitialized
  double delta = 1e-8;          ///< gradient regularization of the flow
  long max_steps = 5'000'000;
  bool richardson = false;
  std::vector<double> snapshot_times;
  kernels::Backend backend = kernels::Backend::openmp;

  /// Throws ConfigError.
  void validate() const;
};

struct Snapshot {
  double t = 0.0;
  ScalarField psi;
};

struct ArrivalResult {
  ScalarField u;  ///< zero on and outside the initial surface
  double extinction_time = 0.0;
  SolveMethod method = SolveMethod::parabolic;
  bool complete = true;  ///< false if the run stopped before extinction
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
  std::vector<Snapshot> snapshots;
  /// Per-epsilon fields of the regularized solve, in schedule order.
  std::vector<std::pair<double, ScalarField>> per_epsilon;
};

/// Level-set curvature flow of `initial` with first-crossing arrival times.
/// Throws NumericalError on blow-up. A run that exceeds max_steps returns
/// with complete = false.
ArrivalResult solve_parabolic(const ScalarField& initial, const SolveConfig& config);

/// Regularized Dirichlet problem for each epsilon of the schedule, solved by
/// damped Newton with continuation.
ArrivalResult solve_elliptic_regularized(const ScalarField& initial, const SolveConfig& config);

/// Solve the Poisson problem -lap u = 1 with the same boundary treatment.
ScalarField solve_poisson(const ScalarField& initial);

/// Max of u over the grid.
double extinction_time(const ArrivalResult& result);
double extinction_time(const ScalarField& u);

/// Max |grad u| over nodes with u > 0 and one node of clearance.
double max_gradient_norm(const ScalarField& u);

/// Min over nodes with u > T of the distance to the initial zero set,
/// taken as -initial (initial is a signed distance field).
double clearing_distance(const ScalarField& u, const ScalarField& initial, double T);

}  // namespace lsflab
