#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "lsflab/arrival.hpp"
#include "lsflab/shapes.hpp"
#include "lsflab/singular.hpp"

using namespace lsflab;

namespace {

struct Run {
  ScalarField initial;
  ArrivalResult result;
  SingularAnalysis analysis;
};

const Run& run_of(const std::string& name, double h) {
  static std::map<std::pair<std::string, double>, Run> cache;
  auto it = cache.find({name, h});
  if (it == cache.end()) {
    const ShapeSpec s = preset(name);
    Run r;
    r.initial = generate_sdf(s, default_grid(s, h));
    r.result = solve_parabolic(r.initial, SolveConfig{});
    r.analysis = analyze_singular_set(r.result);
    it = cache.emplace(std::make_pair(name, h), std::move(r)).first;
  }
  return it->second;
}

int count_type(const std::vector<SingularComponent>& comps, ComponentType t) {
  return static_cast<int>(std::count_if(comps.begin(), comps.end(),
                                        [&](const auto& c) { return c.component_type == t; }));
}

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::acos(std::min(1.0, std::abs(a.normalized().dot(b.normalized())))) * 180.0 / std::numbers::pi;
}

// Invariants every analysis must satisfy.
void check_invariants(const SingularAnalysis& an, const ScalarField& u) {
  const auto& th = an.set.thresholds;
  for (const auto& c : an.components) {
    CHECK(c.time_spread <= th.tol_time);
    CHECK(c.consistent);
    for (const auto& p : c.points) {
      CHECK(p.grad_norm <= th.tau_grad);
      CHECK(p.probe.min_drop < 0.0);  // never a local minimum
      if (p.kind == PointKind::round) {
        for (double e : p.hessian_eigs) CHECK(std::abs(e - 0.5) <= th.tol_eig);
      }
      if (p.kind == PointKind::cylindrical) {
        CHECK(std::abs(p.hessian_eigs[0]) <= th.tol_eig);
        CHECK(std::abs(p.hessian_eigs[1] - 1.0) <= th.tol_eig);
        CHECK(std::abs(p.hessian_eigs[2] - 1.0) <= th.tol_eig);
      }
    }
    if (c.geometry == Geometry::curve) {
      for (std::size_t i = 1; i + 1 < c.points.size(); ++i) {
        CHECK(c.points[i].critical_type == CriticalType::local_max);
      }
    }
    const double dt = default_split_dt(u, c, th.tol_time);
    const int n = splitting_check(u, c, dt, component_scale(u, c, th.h));
    switch (c.component_type) {
      case ComponentType::vanishing: CHECK(n == 0); break;
      case ComponentType::splitting: CHECK(n >= 2); break;
      case ComponentType::bumpy: CHECK(n == 1); break;
      case ComponentType::unknown: break;
    }
  }
}

}  // namespace

TEST_SUITE("singular_analysis") {

TEST_CASE("thresholds follow the resolution") {
  const Run& r = run_of("sphere", 1.0 / 16.0);
  const auto& th = r.analysis.set.thresholds;
  const double h = 1.0 / 16.0;
  CHECK(th.h == h);
  CHECK(th.tau_grad == doctest::Approx(2.0 * h * th.max_grad));
  CHECK(th.tol_time == doctest::Approx(10.0 * h * h));
  CHECK(th.r_probe == doctest::Approx(4.0 * h));
  CHECK(th.t_floor == doctest::Approx(3.0 * r.result.diagnostics.at("dt")));
  CHECK(th.tol_eig == 0.15);
}

TEST_CASE("sphere: one vanishing round point at the origin") {
  const double h = 1.0 / 16.0;
  const Run& r = run_of("sphere", h);
  const auto& an = r.analysis;
  REQUIRE(an.components.size() == 1);
  const auto& c = an.components[0];
  CHECK(c.geometry == Geometry::point);
  CHECK(c.component_type == ComponentType::vanishing);
  CHECK(c.extinction_consistent);
  REQUIRE(c.points.size() == 1);
  const auto& p = c.points[0];
  CHECK(p.position.norm() <= 2.0 * h);
  CHECK(std::abs(p.time - 0.25) <= 5.0 * h * h);
  CHECK(std::abs(p.time - r.result.extinction_time) <= an.set.thresholds.tol_time);
  CHECK(p.kind == PointKind::round);
  CHECK(p.critical_type == CriticalType::local_max);
  for (double e : p.hessian_eigs) CHECK(std::abs(e - 0.5) <= 0.1);
  CHECK(splitting_check(r.result.u, c, 0.01, 0.25) == 0);
  CHECK_THROWS_AS(splitting_check(r.result.u, c, 0.0, 0.25), PreconditionError);
  CHECK_THROWS_AS(cone_containment(r.result.u, p, 0.5, 0.3), PreconditionError);
  CHECK_THROWS_AS(cylindrical_scale_estimate(r.result.u, p, 0.1), PreconditionError);
  check_invariants(an, r.result.u);
}

TEST_CASE("empty detection on a vanishing field is an error") {
  const Run& r = run_of("sphere", 1.0 / 16.0);
  SingularThresholds th = r.analysis.set.thresholds;
  th.tau_grad = -1.0;
  CHECK_THROWS_AS(detect_critical_set(r.result.u, th), NumericalError);
}

TEST_CASE("dumbbell: splitting neck between two vanishing bulbs") {
  const double h = 1.0 / 32.0;
  const Run& r = run_of("dumbbell", h);
  const auto& an = r.analysis;
  const auto& u = r.result.u;
  CHECK(an.set.clusters.size() == 3);
  REQUIRE(an.components.size() == 3);
  CHECK(count_type(an.components, ComponentType::splitting) == 1);
  CHECK(count_type(an.components, ComponentType::vanishing) == 2);
  const auto neck_it = std::find_if(an.components.begin(), an.components.end(), [](const auto& c) {
    return c.component_type == ComponentType::splitting;
  });
  REQUIRE(neck_it != an.components.end());
  const auto& neck = neck_it->points.at(0);
  CHECK(neck.position.norm() <= 2.0 * h);
  CHECK(neck.kind == PointKind::cylindrical);
  CHECK(neck.critical_type == CriticalType::saddle_two_sided);
  CHECK(angle_deg(neck.axis, Vec3::UnitZ()) <= 10.0);
  CHECK(neck.probe.rise_plus > neck.probe.margin);
  CHECK(neck.probe.rise_minus > neck.probe.margin);
  for (const auto& c : an.components) {
    if (c.component_type != ComponentType::vanishing) continue;
    CHECK(c.points.at(0).kind == PointKind::round);
    CHECK(std::abs(std::abs(c.points[0].position.z()) - 0.916) <= 2.0 * h);
  }

  const double T_ext = r.result.extinction_time;
  const double dt = 0.1 * (T_ext - neck_it->time);
  CHECK(default_split_dt(u, *neck_it, an.set.thresholds.tol_time) == doctest::Approx(dt));
  CHECK(splitting_check(u, *neck_it, dt, component_scale(u, *neck_it, h)) == 2);

  const ConeResult cone = cone_containment(u, neck, std::numbers::pi / 6.0, 0.45);
  CHECK(cone.pass);
  CHECK(cone.nodes_checked > 0);
  CHECK(cone_containment(u, neck, 0.4999 * std::numbers::pi, 0.45).pass);

  const CylindricalScale cs = cylindrical_scale_estimate(u, neck, 0.2);
  CHECK(cs.radius > 0.0);
  CHECK(cs.tested.size() == cs.worst_ratio.size());
  check_invariants(an, u);
}

TEST_CASE("capsule: one vanishing curve of local maxima") {
  const double h = 1.0 / 32.0;
  const Run& r = run_of("capsule", h);
  const auto& an = r.analysis;
  REQUIRE(an.components.size() == 1);
  const auto& c = an.components[0];
  CHECK(c.geometry == Geometry::curve);
  CHECK(c.component_type == ComponentType::vanishing);
  CHECK_FALSE(c.closed);
  CHECK(c.points.size() >= 3);
  CHECK(c.curve_polyline.size() == c.points.size());
  for (const auto& p : c.points) {
    CHECK(std::hypot(p.position.x(), p.position.y()) <= 2.0 * h);
    CHECK(std::abs(p.time - 0.045) <= an.set.thresholds.tol_time);
  }
  // Polyline ordered along the axis.
  for (std::size_t i = 1; i < c.curve_polyline.size(); ++i) {
    CHECK(c.curve_polyline[i].z() > c.curve_polyline[i - 1].z());
  }
  check_invariants(an, r.result.u);
}

TEST_CASE("bumpy dumbbell: measured bumpy component next to a surviving bulb") {
  const Run& r = run_of("bumpy_dumbbell", 1.0 / 32.0);
  const auto& an = r.analysis;
  CHECK(an.components.size() == 2);
  CHECK(count_type(an.components, ComponentType::bumpy) == 1);
  CHECK(count_type(an.components, ComponentType::vanishing) == 1);
  for (const auto& c : an.components) {
    if (c.component_type != ComponentType::bumpy) continue;
    const auto types = c.endpoint_types;
    CHECK(((types[0] == CriticalType::saddle_one_sided) != (types[1] == CriticalType::saddle_one_sided)));
  }
  check_invariants(an, r.result.u);
}

TEST_CASE("synthetic cylinder field") {
  // u = (R^2 - rho^2) / 2 with R = 1, extended past the cylinder.
  const double h = 1.0 / 16.0;
  const UniformGrid g = UniformGrid::covering(Vec3(-2.3, -2.3, -1.3), Vec3(2.3, 2.3, 1.3), h);
  const ScalarField u = lsflab::test::sample(g, [](const Vec3& x) {
    return (1.0 - x.x() * x.x() - x.y() * x.y()) / 2.0;
  });
  CriticalPoint cp;
  cp.position = Vec3::Zero();
  cp.time = 0.5;
  classify_hessian(cp, u);
  CHECK(cp.kind == PointKind::cylindrical);
  CHECK(angle_deg(cp.axis, Vec3::UnitZ()) * std::numbers::pi / 180.0 <= 1e-6);
  CHECK(cp.hessian_eigs[0] == doctest::Approx(0.0));
  CHECK(cp.hessian_eigs[1] == doctest::Approx(1.0));
  const CylindricalScale cs = cylindrical_scale_estimate(u, cp, 0.1);
  CHECK(cs.radius >= 1.0);
  CHECK(cs.warning.empty());

  // Round quadratic: round kind, local max.
  const ScalarField b = lsflab::test::sample(g, [](const Vec3& x) { return (1.0 - x.squaredNorm()) / 4.0; });
  CriticalPoint rp;
  rp.time = 0.25;
  classify_hessian(rp, b);
  CHECK(rp.kind == PointKind::round);
  ProbeSettings ps;
  ps.r_probe = 4.0 * h;
  CHECK(classify_critical_type(rp, b, ps) == CriticalType::local_max);
}

TEST_CASE("property: probes near the grid edge raise a boundary error") {
  const double h = 1.0 / 16.0;
  const UniformGrid g = UniformGrid::covering(Vec3::Constant(-0.5), Vec3::Constant(0.5), h);
  const ScalarField u = lsflab::test::sample(g, [](const Vec3& x) {
    return (1.0 - x.x() * x.x() - x.y() * x.y()) / 2.0;
  });
  CriticalPoint cp;
  cp.position = Vec3(0.0, 0.0, 0.4);
  cp.time = 0.5;
  cp.kind = PointKind::cylindrical;
  ProbeSettings ps;
  ps.r_probe = 0.3;
  CHECK_THROWS_AS(classify_critical_type(cp, u, ps), BoundaryError);
}

TEST_CASE("probe jitter is reproducible for a fixed seed") {
  const Run& r = run_of("dumbbell", 1.0 / 32.0);
  SingularThresholds th = r.analysis.set.thresholds;
  const SingularAnalysis again = analyze_singular_set(r.result.u, th);
  REQUIRE(again.components.size() == r.analysis.components.size());
  for (std::size_t i = 0; i < again.components.size(); ++i) {
    for (std::size_t k = 0; k < again.components[i].points.size(); ++k) {
      CHECK(again.components[i].points[k].probe.rise_plus ==
            r.analysis.components[i].points[k].probe.rise_plus);
    }
  }
}

}  // TEST_SUITE
