#include "lsflab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lsflab/diffops.hpp"

namespace lsflab {

std::string to_string(Match m) {
  switch (m) {
    case Match::yes: return "yes";
    case Match::no: return "no";
    case Match::not_applicable: return "not_applicable";
  }
  return "?";
}

void ExperimentPlan::validate() const {
  base.validate();
  solve.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h must be positive");
  if (perturbations.empty()) throw ConfigError("plan needs at least one perturbation");
  for (std::size_t i = 0; i < perturbations.size(); ++i) {
    const double a = perturbations[i].amplitude;
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("amplitudes must be >= 0");
    if (i > 0 && !(a < perturbations[i - 1].amplitude)) {
      throw ConfigError("amplitudes must be strictly decreasing");
    }
  }
  if (delta_neighborhood != 0.0 && !(delta_neighborhood > 4.0 * h)) {
    throw ConfigError("delta must exceed 4h");
  }
  if (!(cap_flux_margin >= 0.0 && cap_flux_margin < 2.0)) {
    throw ConfigError("cap flux margin must lie in [0, 2)");
  }
}

namespace {

double segment_distance(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double L2 = d.squaredNorm();
  const double s = L2 > 0.0 ? std::clamp((x - a).dot(d) / L2, 0.0, 1.0) : 0.0;
  return (x - (a + s * d)).norm();
}

double component_distance(const Vec3& x, const SingularComponent& c) {
  double best = std::numeric_limits<double>::infinity();
  if (c.geometry == Geometry::curve && c.curve_polyline.size() >= 2) {
    for (std::size_t i = 0; i + 1 < c.curve_polyline.size(); ++i) {
      best = std::min(best, segment_distance(x, c.curve_polyline[i], c.curve_polyline[i + 1]));
    }
    return best;
  }
  for (const auto& p : c.points) best = std::min(best, (x - p.position).norm());
  return best;
}

std::vector<Vec3> all_points(const std::vector<SingularComponent>& comps) {
  std::vector<Vec3> out;
  for (const auto& c : comps)
    for (const auto& p : c.points) out.push_back(p.position);
  return out;
}

bool interior_in(const ScalarField& u, const Node& n) {
  const auto& g = u.grid;
  if (g.boundary_distance(n) < 1) return false;
  if (!(u.at(n) > 0.0)) return false;
  for (int a = 0; a < 3; ++a) {
    for (int s : {-1, 1}) {
      Node q = n;
      (a == 0 ? q.i : a == 1 ? q.j : q.k) += s;
      if (!(u.at(q) > 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

double distance_to_singular_set(const Vec3& x, const std::vector<SingularComponent>& comps) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : comps) best = std::min(best, component_distance(x, c));
  return best;
}

double default_delta(const std::vector<SingularComponent>& comps, double h, double requested) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (std::size_t j = i + 1; j < comps.size(); ++j)
      for (const auto& p : comps[j].points) sep = std::min(sep, component_distance(p.position, comps[i]));
  double delta = requested;
  if (!(delta > 0.0)) delta = std::isfinite(sep) ? std::max(6.0 * h, 0.1 * sep) : 6.0 * h;
  if (std::isfinite(sep) && !(2.0 * delta < sep)) {
    throw ConfigError("delta-neighborhoods of distinct singular components overlap");
  }
  return delta;
}

StabilityRow compare_runs(const ScalarField& u_base, const SingularAnalysis& base,
                          const ArrivalResult& perturbed, double amplitude, double delta,
                          double cap_flux_margin) {
  StabilityRow row;
  row.amplitude = amplitude;
  const auto& uk = perturbed.u;
  if (!(uk.grid == u_base.grid)) throw ConfigError("baseline and perturbed grids differ");
  if (!perturbed.complete) {
    row.failed = true;
    row.failure = "perturbed solve did not reach extinction";
    return row;
  }
  const auto& g = u_base.grid;
  const auto& comps = base.components;
  row.extinction_time = perturbed.extinction_time;
  row.extinction_gap = std::abs(extinction_time(u_base) - perturbed.extinction_time);
  for (std::size_t i = 0; i < g.size(); ++i) {
    row.sup_u_gap = std::max(row.sup_u_gap, std::abs(u_base[i] - uk[i]));
  }
  // Off-S gradient gap over nodes whose stencil lies inside both supports.
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Node n = g.node(i);
    if (!interior_in(u_base, n) || !interior_in(uk, n)) continue;
    if (distance_to_singular_set(g.position(i), comps) <= delta) continue;
    const double d = (central_gradient(u_base, n) - central_gradient(uk, n)).norm();
    row.sup_grad_gap_offS = std::max(row.sup_grad_gap_offS, d);
  }

  SingularAnalysis pert;
  try {
    pert = analyze_singular_set(perturbed);
  } catch (const NumericalError& e) {
    row.failed = true;
    row.failure = e.what();
    return row;
  }
  row.perturbed_components = static_cast<int>(pert.components.size());
  const double tol_time = pert.set.thresholds.tol_time;
  for (const auto& p : all_points(pert.components)) {
    if (distance_to_singular_set(p, comps) > delta) row.containment_pass = false;
  }

  bool single_time = true, caps_ok = true, bumpy_seen = true;
  row.cap_flux_min = 1.0;
  std::vector<std::vector<const SingularComponent*>> near(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& pc : pert.components) {
      bool inside = false;
      for (const auto& p : pc.points) {
        if (component_distance(p.position, comps[c]) <= delta) {
          inside = true;
          lo = std::min(lo, p.time);
          hi = std::max(hi, p.time);
        }
      }
      if (inside) near[c].push_back(&pc);
    }
    if (std::isfinite(lo) && hi - lo > tol_time) single_time = false;
    if (comps[c].component_type == ComponentType::bumpy && near[c].empty()) bumpy_seen = false;

    // Cap flux: polar caps (within 30 degrees of the axis) of the
    // delta-neighborhood of cylindrical components.
    const auto& mid = comps[c].points[comps[c].points.size() / 2];
    if (mid.kind != PointKind::cylindrical) continue;
    const Vec3 axis = comps[c].geometry == Geometry::curve ? comps[c].points.front().axis
                                                           : mid.axis;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Node n = g.node(i);
      const Vec3 x = g.position(i);
      const double d = component_distance(x, comps[c]);
      if (d < delta - g.h() || d > delta || !interior_in(uk, n)) continue;
      const Vec3 nearest_dir = [&] {
        Vec3 best = x - comps[c].points.front().position;
        for (const auto& p : comps[c].points) {
          if ((x - p.position).norm() < best.norm()) best = x - p.position;
        }
        return best;
      }();
      if (nearest_dir.norm() == 0.0) continue;
      const Vec3 nu = nearest_dir.normalized();
      if (std::abs(nu.dot(axis.normalized())) < std::cos(std::numbers::pi / 6.0)) continue;
      const Vec3 gk = central_gradient(uk, n);
      if (gk.norm() <= 0.0) continue;
      row.cap_flux_min = std::min(row.cap_flux_min, gk.dot(nu) / gk.norm());
    }
    if (!(row.cap_flux_min > -1.0 + cap_flux_margin)) caps_ok = false;
  }
  row.proxies["single_singular_time"] = single_time;
  row.proxies["cap_flux"] = caps_ok;
  row.proxies["bumpy_nearby"] = bumpy_seen;
  const bool proxies_hold = single_time && caps_ok && bumpy_seen;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (!proxies_hold) {
      row.type_match.push_back(Match::not_applicable);
      continue;
    }
    const bool ok = near[c].size() == 1 &&
                    near[c].front()->component_type == comps[c].component_type;
    row.type_match.push_back(ok ? Match::yes : Match::no);
  }
  return row;
}

StabilityReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  StabilityReport rep;
  rep.base = plan.base;
  rep.h = plan.h;
  const UniformGrid grid = default_grid(plan.base, plan.h);
  const ScalarField f0 = generate_sdf(plan.base, grid);
  SolveConfig cfg = plan.solve;
  cfg.method = SolveMethod::parabolic;
  cfg.snapshot_times = plan.snapshot_times;
  const ArrivalResult base = solve_parabolic(f0, cfg);
  if (!base.complete) throw NumericalError("baseline solve did not reach extinction");
  const SingularAnalysis ba = analyze_singular_set(base);
  if (ba.components.empty()) throw NumericalError("baseline has no singular components");
  rep.baseline_extinction_time = base.extinction_time;
  rep.baseline_components = ba.components;
  rep.delta = default_delta(ba.components, plan.h, plan.delta_neighborhood);

  for (const auto& pert : plan.perturbations) {
    const ScalarField fk = perturb_field(f0, plan.base, pert);
    try {
      const ArrivalResult rk = solve_parabolic(fk, cfg);
      rep.rows.push_back(
          compare_runs(base.u, ba, rk, pert.amplitude, rep.delta, plan.cap_flux_margin));
    } catch (const NumericalError& e) {
      StabilityRow row;
      row.amplitude = pert.amplitude;
      row.failed = true;
      row.failure = e.what();
      rep.rows.push_back(row);
    }
  }
  return rep;
}

std::vector<Vec3> level_set_points(const ScalarField& u, double t) {
  const auto& g = u.grid;
  const double fence = gradient_fence(g.h());
  std::vector<Vec3> out;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Node n = g.node(idx);
    if (g.boundary_distance(n) < 2) continue;
    const double v = u[idx] - t;
    bool cross = false;
    for (int a = 0; a < 3 && !cross; ++a) {
      Node q = n;
      (a == 0 ? q.i : a == 1 ? q.j : q.k) += 1;
      const double w = u.at(q) - t;
      cross = (v < 0.0) != (w < 0.0);
    }
    if (!cross) continue;
    Vec3 p = g.position(n);
    bool ok = true;
    for (int it = 0; it < 2 && ok; ++it) {
      const Vec3 gr = jet2_interpolated(u, p).gradient;
      if (gr.norm() < fence) {
        ok = false;
        break;
      }
      p -= ((trilinear_sample(u, p) - t) / gr.squaredNorm()) * gr;
      ok = g.contains(p, -2.0 * g.h()) && (p - g.position(n)).norm() < 2.0 * g.h();
    }
    if (ok) out.push_back(p);
  }
  return out;
}

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto one_sided = [](const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) {
        best = std::min(best, (p - q).squaredNorm());
        if (best <= worst) break;
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

double level_set_hausdorff(const ScalarField& a, const ScalarField& b, double t) {
  if (!(a.grid == b.grid)) throw ConfigError("level set grids differ");
  const auto pa = level_set_points(a, t);
  const auto pb = level_set_points(b, t);
  if (pa.empty() && pb.empty()) return 0.0;
  if (pa.empty() || pb.empty()) return std::numeric_limits<double>::infinity();
  const double fence = gradient_fence(a.grid.h());
  // Each point is compared with the nearest sample of the other cloud and
  // with its Newton projection onto the other level set; both are points of
  // that set, so the smaller distance is still an upper bound.
  auto one_sided = [&](const std::vector<Vec3>& x, const std::vector<Vec3>& y,
                       const ScalarField& other) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, (p - q).squaredNorm());
      best = std::sqrt(best);
      Vec3 q = p;
      bool ok = true;
      double gn = 0.0;
      for (int it = 0; it < 8 && ok; ++it) {
        if (!other.grid.contains(q, -2.0 * other.grid.h())) {
          ok = false;
          break;
        }
        const Vec3 gr = jet2_interpolated(other, q).gradient;
        gn = gr.norm();
        if (gn < fence) {
          ok = false;
          break;
        }
        q -= ((trilinear_sample(other, q) - t) / gr.squaredNorm()) * gr;
      }
      if (ok && other.grid.contains(q) &&
          std::abs(trilinear_sample(other, q) - t) <= 1e-3 * other.grid.h() * gn) {
        best = std::min(best, (p - q).norm());
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(pa, pb, b), one_sided(pb, pa, a));
}

RegularIntervalResult regular_interval_check(const ScalarField& base, const ScalarField& perturbed,
                                             double a, double b,
                                             const std::vector<SingularComponent>& base_components,
                                             const std::vector<SingularComponent>& pert_components,
                                             const std::vector<double>& times) {
  if (!(a < b)) throw PreconditionError("empty time interval");
  if (!(base.grid == perturbed.grid)) throw ConfigError("baseline and perturbed grids differ");
  for (const auto& c : base_components) {
    for (const auto& p : c.points) {
      if (p.time >= a && p.time <= b) {
        throw PreconditionError("interval contains a baseline singular time");
      }
    }
  }
  RegularIntervalResult res;
  for (double t : times) {
    if (t >= a && t <= b) res.levels.push_back(t);
  }
  if (res.levels.empty()) {
    for (int i = 0; i < 5; ++i) res.levels.push_back(a + (b - a) * i / 4.0);
  }
  for (const auto& c : pert_components)
    for (const auto& p : c.points)
      if (p.time >= a && p.time <= b) ++res.perturbed_critical_in_interval;
  for (double t : res.levels) {
    res.gap = std::max(res.gap,
                       level_set_hausdorff(base, perturbed, t));
  }
  return res;
}

}  // namespace lsflab
