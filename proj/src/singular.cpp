#include "lsflab/singular.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "lsflab/components.hpp"
#include "lsflab/diffops.hpp"

namespace lsflab {

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::round: return "round";
    case PointKind::cylindrical: return "cylindrical";
    case PointKind::ambiguous: return "ambiguous";
  }
  return "?";
}

std::string to_string(CriticalType t) {
  switch (t) {
    case CriticalType::local_max: return "local_max";
    case CriticalType::saddle_one_sided: return "saddle_one_sided";
    case CriticalType::saddle_two_sided: return "saddle_two_sided";
  }
  return "?";
}

std::string to_string(Geometry g) { return g == Geometry::curve ? "curve" : "point"; }

std::string to_string(ComponentType t) {
  switch (t) {
    case ComponentType::vanishing: return "vanishing";
    case ComponentType::splitting: return "splitting";
    case ComponentType::bumpy: return "bumpy";
    case ComponentType::unknown: return "unknown";
  }
  return "?";
}

namespace {

// Sign convention for eigenvectors: largest-magnitude component positive.
Vec3 canonical(Vec3 v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  return v[i] < 0.0 ? Vec3(-v) : v;
}

std::array<Vec3, 2> perp_frame(const Vec3& a) { return tangent_frame(a.normalized()); }

}  // namespace

SingularThresholds default_thresholds(const ScalarField& u, double dt) {
  SingularThresholds th;
  th.h = u.grid.h();
  th.max_grad = max_gradient_norm(u);
  th.tau_grad = 2.0 * th.h * th.max_grad;
  const double step = dt > 0.0 ? dt : 0.5 * th.h * th.h / (2.0 * kDim);
  th.t_floor = 3.0 * step;
  th.axial_slope = th.h * th.max_grad / 8.0;
  th.tol_time = 10.0 * th.h * th.h;
  th.r_probe = 4.0 * th.h;
  th.probe_margin = 0.5 * th.axial_slope * th.r_probe;
  th.min_curve_length = 4.0 * th.h;
  return th;
}

namespace {

CriticalPoint refine_point(const ScalarField& u, const Node& seed, double tol_eig) {
  const auto& g = u.grid;
  const double h = g.h();
  const Jet2 j = jet2_at(u, seed);
  const Vec3 x0 = g.position(seed);
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (j.hessian + j.hessian.transpose()));
  const Vec3 lam = es.eigenvalues();
  const double big = lam.cwiseAbs().maxCoeff();
  Vec3 d = Vec3::Zero();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(lam[a]) >= tol_eig * big && big > 0.0) {
      const Vec3 v = es.eigenvectors().col(a);
      d -= (v.dot(j.gradient) / lam[a]) * v;
    }
  }
  if (d.norm() > h) d *= h / d.norm();
  CriticalPoint cp;
  cp.position = x0;
  cp.time = j.value;
  cp.grad_norm = j.gradient.norm();
  for (int halvings = 0; halvings < 3 && d.norm() > 1e-14 * h; ++halvings, d *= 0.5) {
    const Vec3 x1 = x0 + d;
    if (!g.contains(x1)) continue;
    const double g1 = jet2_interpolated(u, x1).gradient.norm();
    if (g1 < cp.grad_norm) {
      cp.position = x1;
      cp.grad_norm = g1;
      cp.time = j.value + j.gradient.dot(d) + 0.5 * d.dot(j.hessian * d);
      break;
    }
  }
  return cp;
}

}  // namespace

CriticalSet detect_critical_set(const ScalarField& u, const SingularThresholds& th) {
  const auto& g = u.grid;
  CriticalSet set;
  set.thresholds = th;
  set.mask = Mask(g);
  const std::size_t n = g.size();
  std::vector<Vec3> grad(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u[i] > th.t_floor)) continue;
    const Node nd = g.node(i);
    if (g.boundary_distance(nd) < 2) continue;
    grad[i] = central_gradient(u, nd);
    if (grad[i].norm() <= th.tau_grad) set.mask.on[i] = 1;
  }
  set.clusters = connected_components(set.mask, 26);

  for (std::size_t c = 0; c < set.clusters.size(); ++c) {
    const auto& members = set.clusters[c];
    Vec3 mean = Vec3::Zero();
    for (auto i : members) mean += g.position(i);
    mean /= static_cast<double>(members.size());
    Mat3 cov = Mat3::Zero();
    for (auto i : members) {
      const Vec3 d = g.position(i) - mean;
      cov += d * d.transpose();
    }
    Vec3 e = Vec3::UnitZ();
    if (members.size() > 1) {
      Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
      if (es.eigenvalues()[2] > 1e-12 * g.h() * g.h()) e = canonical(es.eigenvectors().col(2));
    }
    // Ridge: max-u node per bin of width h along e.
    double smin = std::numeric_limits<double>::infinity();
    for (auto i : members) smin = std::min(smin, (g.position(i) - mean).dot(e));
    std::map<long, std::size_t> ridge;
    for (auto i : members) {
      const long b = std::lround(((g.position(i) - mean).dot(e) - smin) / g.h());
      auto it = ridge.find(b);
      if (it == ridge.end() || u[i] > u[it->second]) ridge[b] = i;
    }
    // Runs of ridge nodes whose slope along e is below the axial threshold.
    // A sign change between neighbouring ridge nodes marks the smaller one
    // flat as well: the zero of the slope lies between them.
    std::vector<std::pair<long, std::size_t>> rv(ridge.begin(), ridge.end());
    std::vector<double> slope(rv.size());
    for (std::size_t m = 0; m < rv.size(); ++m) slope[m] = grad[rv[m].second].dot(e);
    std::vector<std::vector<std::size_t>> runs;
    long last_bin = std::numeric_limits<long>::min();
    for (std::size_t m = 0; m < rv.size(); ++m) {
      const auto [b, i] = rv[m];
      bool flat = std::abs(slope[m]) <= th.axial_slope;
      for (std::size_t q : {m - 1, m + 1}) {
        if (q >= rv.size() || std::abs(rv[q].first - b) > 2) continue;
        if (slope[m] * slope[q] < 0.0 && std::abs(slope[m]) <= std::abs(slope[q])) flat = true;
      }
      if (!flat) {
        last_bin = std::numeric_limits<long>::min();
        continue;
      }
      if (last_bin == std::numeric_limits<long>::min() || b - last_bin > 2) runs.emplace_back();
      runs.back().push_back(i);
      last_bin = b;
    }
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& run = runs[r];
      const double len = (g.position(run.back()) - g.position(run.front())).dot(e);
      if (run.size() >= 3 && len >= th.min_curve_length) {
        for (auto i : run) {
          CriticalPoint cp;
          cp.position = g.position(i);
          cp.time = u[i];
          cp.grad_norm = grad[i].norm();
          cp.axis = e;
          cp.cluster = static_cast<int>(c);
          cp.run = static_cast<int>(r);
          cp.curve_vertex = true;
          set.points.push_back(cp);
        }
      } else {
        std::size_t seed = run.front();
        for (auto i : run) {
          if (grad[i].norm() < grad[seed].norm()) seed = i;
        }
        CriticalPoint cp = refine_point(u, g.node(seed), th.tol_eig);
        cp.axis = e;
        cp.cluster = static_cast<int>(c);
        cp.run = static_cast<int>(r);
        set.points.push_back(cp);
      }
    }
  }

  // Merge isolated points closer than 2h, keeping the smaller residual.
  std::vector<CriticalPoint> kept;
  for (const auto& cp : set.points) {
    bool merged = false;
    if (!cp.curve_vertex) {
      for (auto& k : kept) {
        if (!k.curve_vertex && (k.position - cp.position).norm() < 2.0 * th.h) {
          if (cp.grad_norm < k.grad_norm) k = cp;
          merged = true;
          break;
        }
      }
    }
    if (!merged) kept.push_back(cp);
  }
  set.points = std::move(kept);

  if (set.points.empty() && extinction_time(u) > th.t_floor) {
    throw NumericalError("no critical point detected: tau_grad too small for h");
  }
  return set;
}

CriticalSet detect_critical_set(const ArrivalResult& result) {
  const auto it = result.diagnostics.find("dt");
  const double dt = it == result.diagnostics.end() ? 0.0 : it->second;
  return detect_critical_set(result.u, default_thresholds(result.u, dt));
}

void classify_hessian(CriticalPoint& cp, const ScalarField& u, double tol_eig) {
  const Jet2 j = jet2_fit(u, u.grid.nearest(cp.position));
  const Mat3 A = -0.5 * (j.hessian + j.hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(A);
  const Vec3 lam = es.eigenvalues();
  for (int a = 0; a < 3; ++a) cp.hessian_eigs[static_cast<std::size_t>(a)] = lam[a];
  const double round = 1.0 / (kDim - 1);
  const double cyl = 1.0 / (kDim - 2);
  bool is_round = true;
  for (int a = 0; a < 3; ++a) is_round = is_round && std::abs(lam[a] - round) <= tol_eig;
  const bool is_cyl = std::abs(lam[0]) <= tol_eig && std::abs(lam[1] - cyl) <= tol_eig &&
                      std::abs(lam[2] - cyl) <= tol_eig;
  cp.kind = is_round ? PointKind::round : is_cyl ? PointKind::cylindrical : PointKind::ambiguous;
  Eigen::Index k = 0;
  lam.cwiseAbs().minCoeff(&k);
  cp.axis = canonical(es.eigenvectors().col(k));
}

CriticalType classify_critical_type(CriticalPoint& cp, const ScalarField& u,
                                    const ProbeSettings& ps) {
  const auto& g = u.grid;
  const Vec3 axis = cp.axis.normalized();
  const auto t = perp_frame(axis);
  std::mt19937_64 rng(ps.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double jitter = ps.jitter_deg * std::numbers::pi / 180.0;

  auto sample = [&](const Vec3& p) {
    if (!g.contains(p)) throw BoundaryError("probe leaves the grid");
    return trilinear_sample(u, p) - cp.time;
  };
  ProbeReport rep;
  rep.margin = ps.margin;
  rep.plus_probed = ps.probe_plus;
  rep.minus_probed = ps.probe_minus;
  rep.rise_plus = rep.rise_minus = -std::numeric_limits<double>::infinity();
  rep.min_drop = std::numeric_limits<double>::infinity();
  for (int side : {+1, -1}) {
    double& rise = side > 0 ? rep.rise_plus : rep.rise_minus;
    for (int ray = 0; ray < ps.rays; ++ray) {
      const double th = ray == 0 ? 0.0 : jitter * (0.3 + 0.7 * unit(rng));
      const double az = 2.0 * std::numbers::pi * unit(rng);
      const Vec3 d = std::cos(th) * side * axis +
                     std::sin(th) * (std::cos(az) * t[0] + std::sin(az) * t[1]);
      for (double f : {0.25, 0.5, 0.75, 1.0}) {
        const double v = sample(cp.position + f * ps.r_probe * d);
        rise = std::max(rise, v);
        rep.min_drop = std::min(rep.min_drop, v);
      }
    }
  }
  for (const Vec3& d : {t[0], Vec3(-t[0]), t[1], Vec3(-t[1])}) {
    rep.min_drop = std::min(rep.min_drop, sample(cp.position + 0.5 * ps.r_probe * d));
  }
  cp.probe = rep;
  if (cp.kind == PointKind::round) {
    cp.critical_type = CriticalType::local_max;
    return cp.critical_type;
  }
  const bool up_plus = ps.probe_plus && rep.rise_plus > ps.margin;
  const bool up_minus = ps.probe_minus && rep.rise_minus > ps.margin;
  cp.critical_type = up_plus && up_minus ? CriticalType::saddle_two_sided
                     : (up_plus || up_minus) ? CriticalType::saddle_one_sided
                                             : CriticalType::local_max;
  return cp.critical_type;
}

namespace {

// Max of u over the 6-connected component of {u > level} containing the node
// nearest to p (searched within 2 nodes).
double local_extinction(const ScalarField& u, const Vec3& p, double level) {
  const auto& g = u.grid;
  const Node c = g.nearest(p);
  std::size_t start = g.size();
  double best = -std::numeric_limits<double>::infinity();
  for (int dk = -2; dk <= 2; ++dk)
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di) {
        const Node q{c.i + di, c.j + dj, c.k + dk};
        if (!g.contains(q)) continue;
        const double v = u.at(q);
        if (v > level && v > best) {
          best = v;
          start = g.index(q);
        }
      }
  if (start == g.size()) return level;
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<std::size_t> queue{start};
  seen[start] = 1;
  double top = u[start];
  const auto offs = neighbor_offsets(6);
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    top = std::max(top, u[i]);
    const Node nd = g.node(i);
    for (const auto& o : offs) {
      const Node q{nd.i + o[0], nd.j + o[1], nd.k + o[2]};
      if (!g.contains(q)) continue;
      const std::size_t qi = g.index(q);
      if (!seen[qi] && u[qi] > level) {
        seen[qi] = 1;
        queue.push_back(qi);
      }
    }
  }
  return top;
}

}  // namespace

ComponentType type_component(SingularComponent& comp, const ScalarField& u, double tol_time) {
  if (!comp.consistent) {
    comp.component_type = ComponentType::unknown;
    return comp.component_type;
  }
  ComponentType t = ComponentType::unknown;
  auto from_point = [](CriticalType c) {
    switch (c) {
      case CriticalType::local_max: return ComponentType::vanishing;
      case CriticalType::saddle_two_sided: return ComponentType::splitting;
      case CriticalType::saddle_one_sided: return ComponentType::bumpy;
    }
    return ComponentType::unknown;
  };
  if (comp.geometry == Geometry::point) {
    t = from_point(comp.points.front().critical_type);
  } else if (comp.closed) {
    t = ComponentType::vanishing;
  } else {
    const auto [a, b] = comp.endpoint_types;
    const int maxes = (a == CriticalType::local_max) + (b == CriticalType::local_max);
    const int ones =
        (a == CriticalType::saddle_one_sided) + (b == CriticalType::saddle_one_sided);
    if (maxes == 2) t = ComponentType::vanishing;
    else if (ones == 2) t = ComponentType::splitting;
    else if (maxes == 1 && ones == 1) t = ComponentType::bumpy;
  }
  comp.component_type = t;
  if (t == ComponentType::vanishing) {
    double top = comp.time;
    for (const auto& cp : comp.points) {
      top = std::max(top, local_extinction(u, cp.position, comp.time - tol_time));
    }
    comp.local_extinction_time = top;
    comp.extinction_consistent = std::abs(top - comp.time) <= tol_time;
    if (!comp.extinction_consistent) {
      comp.warnings.push_back("vanishing component below its local extinction time");
    }
  }
  return t;
}

std::vector<SingularComponent> assemble_components(const CriticalSet& set,
                                                   const ScalarField& u) {
  const auto& th = set.thresholds;
  std::map<std::pair<int, int>, std::vector<CriticalPoint>> groups;
  std::vector<std::pair<int, int>> order;
  for (const auto& cp : set.points) {
    const auto key = std::make_pair(cp.cluster, cp.run);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(cp);
  }
  ProbeSettings base;
  base.r_probe = th.r_probe;
  base.seed = th.seed;

  std::vector<SingularComponent> out;
  for (const auto& key : order) {
    SingularComponent comp;
    comp.points = groups[key];
    auto& pts = comp.points;
    if (!pts.front().curve_vertex) {
      comp.geometry = Geometry::point;
      auto& cp = pts.front();
      classify_hessian(cp, u, th.tol_eig);
      ProbeSettings ps = base;
      ps.margin = th.probe_margin;
      classify_critical_type(cp, u, ps);
    } else {
      comp.geometry = Geometry::curve;
      const Vec3 tangent = pts.front().axis;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& cp = pts[i];
        classify_hessian(cp, u, th.tol_eig);
        // Sidedness along the curve is measured against its tangent.
        cp.axis = tangent;
        ProbeSettings ps = base;
        if (i == 0 || i + 1 == pts.size()) {
          // Ends: only the side pointing away from the curve counts.
          ps.margin = th.probe_margin;
          ps.probe_plus = i + 1 == pts.size();
          ps.probe_minus = i == 0;
        } else {
          ps.margin = th.tol_time;
        }
        classify_critical_type(cp, u, ps);
        comp.curve_polyline.push_back(cp.position);
      }
      comp.endpoint_types = {pts.front().critical_type, pts.back().critical_type};
      comp.closed = pts.size() >= 3 &&
                    (pts.front().position - pts.back().position).norm() < 3.0 * th.h;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (const auto& cp : pts) {
      lo = std::min(lo, cp.time);
      hi = std::max(hi, cp.time);
      sum += cp.time;
    }
    comp.time_spread = hi - lo;
    comp.time = sum / static_cast<double>(pts.size());
    comp.consistent = comp.time_spread <= th.tol_time;
    if (!comp.consistent) comp.warnings.push_back("time spread exceeds tol_time");
    type_component(comp, u, th.tol_time);
    out.push_back(std::move(comp));
  }
  return out;
}

SingularAnalysis analyze_singular_set(const ScalarField& u, const SingularThresholds& th) {
  SingularAnalysis a;
  a.set = detect_critical_set(u, th);
  a.components = assemble_components(a.set, u);
  return a;
}

SingularAnalysis analyze_singular_set(const ArrivalResult& result) {
  SingularAnalysis a;
  a.set = detect_critical_set(result);
  a.components = assemble_components(a.set, result.u);
  return a;
}

int splitting_check(const ScalarField& u, const SingularComponent& comp, double dt,
                    double r_hat) {
  if (!(dt > 0.0)) throw PreconditionError("splitting_check needs dt > 0");
  if (comp.points.empty()) throw PreconditionError("empty component");
  const double level = comp.time + dt;
  if (level >= extinction_time(u)) return 0;
  Vec3 lo = comp.points.front().position, hi = lo;
  for (const auto& cp : comp.points) {
    lo = lo.cwiseMin(cp.position);
    hi = hi.cwiseMax(cp.position);
  }
  lo.array() -= 4.0 * r_hat;
  hi.array() += 4.0 * r_hat;
  const auto& g = u.grid;
  Mask m(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(u[i] > level)) continue;
    const Vec3 p = g.position(i);
    if ((p.array() >= lo.array()).all() && (p.array() <= hi.array()).all()) m.on[i] = 1;
  }
  return static_cast<int>(connected_components(m, 6).size());
}

double default_split_dt(const ScalarField& u, const SingularComponent& comp, double tol_time) {
  const double gap = extinction_time(u) - comp.time;
  return gap > tol_time ? 0.1 * gap : tol_time;
}

ConeResult cone_containment(const ScalarField& u, const CriticalPoint& saddle, double phi,
                            double r) {
  if (saddle.kind != PointKind::cylindrical) {
    throw PreconditionError("cone containment needs a cylindrical point");
  }
  ConeResult res;
  const auto& g = u.grid;
  const double h = g.h();
  const Vec3 axis = saddle.axis.normalized();
  const double slack = 2.0 * h;
  const bool whole = phi >= 0.5 * std::numbers::pi;
  const Node lo = g.nearest(saddle.position - Vec3::Constant(r));
  const Node hi = g.nearest(saddle.position + Vec3::Constant(r));
  res.worst_excess = -std::numeric_limits<double>::infinity();
  for (int k = lo.k; k <= hi.k; ++k)
    for (int j = lo.j; j <= hi.j; ++j)
      for (int i = lo.i; i <= hi.i; ++i) {
        const Vec3 d = g.position(i, j, k) - saddle.position;
        if (d.norm() > r || !(u.at(i, j, k) > saddle.time)) continue;
        ++res.nodes_checked;
        if (whole) continue;
        const double z = d.dot(axis);
        const double y = (d - z * axis).norm();
        const double excess = (y - std::abs(z) * std::tan(phi)) * std::cos(phi) - slack;
        res.worst_excess = std::max(res.worst_excess, excess);
        if (excess > 0.0) res.pass = false;
      }
  if (res.nodes_checked == 0 || whole) res.worst_excess = 0.0;
  return res;
}

namespace {

// First radius along o + s d (s in [0, s_max]) where u drops to t, or -1.
double level_crossing(const ScalarField& u, const Vec3& o, const Vec3& d, double t,
                      double s_max) {
  const auto& g = u.grid;
  const double step = 0.5 * g.h();
  if (!g.contains(o) || trilinear_sample(u, o) <= t) return -1.0;
  double s0 = 0.0;
  while (s0 < s_max) {
    const double s1 = std::min(s0 + step, s_max);
    const Vec3 p = o + s1 * d;
    if (!g.contains(p)) return -1.0;
    if (trilinear_sample(u, p) <= t) {
      double a = s0, b = s1;
      for (int it = 0; it < 50; ++it) {
        const double m = 0.5 * (a + b);
        (trilinear_sample(u, o + m * d) > t ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
    s0 = s1;
  }
  return -1.0;
}

}  // namespace

CylindricalScale cylindrical_scale_estimate(const ScalarField& u, const CriticalPoint& cp,
                                            double eps_c0, double phi) {
  if (cp.kind != PointKind::cylindrical) {
    throw PreconditionError("cylindrical scale needs a cylindrical point");
  }
  if (!(eps_c0 > 0.0)) throw PreconditionError("eps_c0 must be positive");
  CylindricalScale out;
  const double h = u.grid.h();
  const Vec3 axis = cp.axis.normalized();
  const auto t = perp_frame(axis);
  const double tphi = std::tan(phi);
  std::vector<double> radii;
  for (int k = 0; std::pow(2.0, -0.5 * k) >= 2.0 * h; ++k) radii.push_back(std::pow(2.0, -0.5 * k));
  std::reverse(radii.begin(), radii.end());
  for (double r : radii) {
    double worst = 0.0;
    for (double f : {1.0, 0.5}) {
      const double gap = f * r * r / (2.0 * (kDim - 2));
      const double level = cp.time - gap;
      const double rc = std::sqrt(2.0 * (kDim - 2) * gap);
      const double allowed = eps_c0 * std::sqrt(gap);
      for (int iz = -4; iz <= 4; ++iz) {
        const double z = r * iz / 4.0;
        const Vec3 o = cp.position + z * axis;
        const bool cyl_in = std::hypot(rc, z) <= r + 2.0 * h && rc > std::abs(z) * tphi;
        for (int ia = 0; ia < 8; ++ia) {
          const double az = 2.0 * std::numbers::pi * ia / 8.0;
          const Vec3 d = std::cos(az) * t[0] + std::sin(az) * t[1];
          const double rho = level_crossing(u, o, d, level, rc + r + 2.0 * h);
          const bool got = rho >= 0.0;
          const bool pt_in = got && std::hypot(rho, z) <= r + 2.0 * h && rho > std::abs(z) * tphi;
          if (!cyl_in && !pt_in) continue;
          const double dev = got ? std::abs(rho - rc) : std::numeric_limits<double>::infinity();
          worst = std::max(worst, dev / allowed);
        }
      }
    }
    out.tested.push_back(r);
    out.worst_ratio.push_back(worst);
    if (worst <= 1.0) out.radius = r;
  }
  if (out.radius == 0.0) out.warning = "no radius passes the cylinder test";
  return out;
}

double component_scale(const ScalarField& u, const SingularComponent& comp, double h,
                       double eps_c0) {
  const CriticalPoint& mid = comp.points[comp.points.size() / 2];
  double r = 0.0;
  if (mid.kind == PointKind::cylindrical) {
    CriticalPoint probe = mid;
    if (comp.geometry == Geometry::curve) probe.axis = comp.points.front().axis;
    r = cylindrical_scale_estimate(u, probe, eps_c0).radius;
  }
  double extent = 0.0;
  for (const auto& cp : comp.points) {
    extent = std::max(extent, (cp.position - mid.position).norm());
  }
  return std::max({r, extent, 4.0 * h});
}

}  // namespace lsflab
