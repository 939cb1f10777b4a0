#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lsflab/arrival.hpp"
#include "lsflab/grid.hpp"

namespace lsflab {

enum class PointKind { round, cylindrical, ambiguous };
enum class CriticalType { local_max, saddle_one_sided, saddle_two_sided };
enum class Geometry { point, curve };
enum class ComponentType { vanishing, splitting, bumpy, unknown };

std::string to_string(PointKind k);
std::string to_string(CriticalType t);
std::string to_string(Geometry g);
std::string to_string(ComponentType t);

/// Thresholds of the critical-set analysis, all derived from h and the field.
struct SingularThresholds {
  double h = 0.0;
  double max_grad = 0.0;    ///< max |grad u| over the support
  double tau_grad = 0.0;    ///< near-critical mask: |grad u| <= tau_grad
  double t_floor = 0.0;     ///< and u > t_floor
  double axial_slope = 0.0; ///< ridge runs: |du/ds| <= axial_slope
  double tol_time = 0.0;
  double tol_eig = 0.15;
  double r_probe = 0.0;
  double probe_margin = 0.0;  ///< sidedness margin at points and curve ends
  double min_curve_length = 0.0;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// dt is the time step of the run that produced u; use 0 for unknown.
SingularThresholds default_thresholds(const ScalarField& u, double dt);

/// What the sidedness probes saw.
struct ProbeReport {
  double rise_plus = 0.0;   ///< max over +axis samples of u - u(cp)
  double rise_minus = 0.0;  ///< same on the -axis side
  double margin = 0.0;
  double min_drop = 0.0;    ///< min over all samples of u - u(cp); < 0 means some sample is lower
  bool plus_probed = true;
  bool minus_probed = true;
};

struct CriticalPoint {
  Vec3 position = Vec3::Zero();
  double time = 0.0;
  double grad_norm = 0.0;
  std::array<double, 3> hessian_eigs{};  ///< of -hess u, ascending
  Vec3 axis = Vec3::UnitZ();
  PointKind kind = PointKind::ambiguous;
  CriticalType critical_type = CriticalType::local_max;
  ProbeReport probe;
  int cluster = -1;  ///< near-critical mask cluster
  int run = -1;      ///< ridge run inside the cluster
  bool curve_vertex = false;
};

struct SingularComponent {
  std::vector<CriticalPoint> points;
  Geometry geometry = Geometry::point;
  std::vector<Vec3> curve_polyline;
  std::array<CriticalType, 2> endpoint_types{CriticalType::local_max, CriticalType::local_max};
  ComponentType component_type = ComponentType::unknown;
  double time = 0.0;
  double time_spread = 0.0;
  bool closed = false;
  bool consistent = true;             ///< time spread within tol_time
  bool extinction_consistent = true;  ///< vanishing: time equals the local extinction time
  double local_extinction_time = 0.0;
  std::vector<std::string> warnings;
};

/// Candidates and the clusters they came from.
struct CriticalSet {
  SingularThresholds thresholds;
  Mask mask;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<CriticalPoint> points;
};

/// Near-critical mask, 26-connected clusters, ridge runs, Newton refinement.
/// Throws NumericalError if nothing is found on a field whose maximum is
/// positive (threshold too small for h).
CriticalSet detect_critical_set(const ScalarField& u, const SingularThresholds& th);
CriticalSet detect_critical_set(const ArrivalResult& result);

/// Eigen-decomposition of -hess u at cp.position; fills kind, axis, eigs.
void classify_hessian(CriticalPoint& cp, const ScalarField& u, double tol_eig = 0.15);

/// Probe layout for classify_critical_type.
struct ProbeSettings {
  double r_probe = 0.0;
  double margin = 0.0;
  int rays = 8;
  double jitter_deg = 15.0;
  bool probe_plus = true;
  bool probe_minus = true;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Half-ball probes along +-axis. Round points are local_max regardless.
/// Throws BoundaryError if a probe leaves the grid.
CriticalType classify_critical_type(CriticalPoint& cp, const ScalarField& u,
                                    const ProbeSettings& ps);

/// Runs the Hessian and sidedness classification on every candidate and
/// groups candidates into components; each component is then typed.
std::vector<SingularComponent> assemble_components(const CriticalSet& set,
                                                   const ScalarField& u);

/// Vanishing/splitting/bumpy from the endpoint types; sets the extinction
/// consistency flag for vanishing components.
ComponentType type_component(SingularComponent& comp, const ScalarField& u,
                             double tol_time);

/// Everything above in one call.
struct SingularAnalysis {
  CriticalSet set;
  std::vector<SingularComponent> components;
};
SingularAnalysis analyze_singular_set(const ScalarField& u, const SingularThresholds& th);
SingularAnalysis analyze_singular_set(const ArrivalResult& result);

/// Number of 6-connected components of {u > comp.time + dt} inside the box
/// of half-width 4 r_hat around the component. Returns 0 once the superlevel
/// set is globally empty. Throws PreconditionError for dt <= 0.
int splitting_check(const ScalarField& u, const SingularComponent& comp, double dt,
                    double r_hat);

/// Default window: 0.1 (T_ext - T), at least tol_time.
double default_split_dt(const ScalarField& u, const SingularComponent& comp, double tol_time);

struct ConeResult {
  bool pass = true;
  double worst_excess = 0.0;  ///< max distance outside the cone, minus the slack
  std::size_t nodes_checked = 0;
};

/// Every node of B_r(p) with u > p.time lies in the double cone of
/// half-angle phi about p.axis, up to a 2h shell. Throws PreconditionError
/// for non-cylindrical points.
ConeResult cone_containment(const ScalarField& u, const CriticalPoint& saddle, double phi,
                            double r);

struct CylindricalScale {
  double radius = 0.0;
  std::vector<double> tested;
  std::vector<double> worst_ratio;  ///< max deviation / (eps sqrt(T - t)) per tested radius
  std::string warning;
};

/// Largest radius of the lattice 2^(-k/2) (down to 2h) up to which the level
/// sets near cp stay close to the round cylinder. phi is the excluded cone.
CylindricalScale cylindrical_scale_estimate(const ScalarField& u, const CriticalPoint& cp,
                                            double eps_c0, double phi = 0.5235987755982988);

/// r_hat for splitting_check: cylindrical scale of the component's points,
/// falling back to the component extent (or 4h) when no scale is available.
double component_scale(const ScalarField& u, const SingularComponent& comp, double h,
                       double eps_c0 = 0.2);

}  // namespace lsflab
