#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "lsflab/stability.hpp"

using namespace lsflab;

namespace {

SingularComponent point_component(const Vec3& p, double t) {
  SingularComponent c;
  CriticalPoint cp;
  cp.position = p;
  cp.time = t;
  c.points.push_back(cp);
  c.time = t;
  return c;
}

ExperimentPlan sphere_plan(double h) {
  ExperimentPlan p;
  p.base = preset("sphere");
  p.h = h;
  for (double a : {0.04, 0.02, 0.01, 0.0}) {
    PerturbationSpec s;
    s.amplitude = a;
    p.perturbations.push_back(s);
  }
  return p;
}

}  // namespace

TEST_SUITE("stability_lab") {

TEST_CASE("plan validation") {
  ExperimentPlan p = sphere_plan(1.0 / 16.0);
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.perturbations[1].amplitude = 0.04;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.perturbations.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.perturbations.back().amplitude = -0.001;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.h = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.delta_neighborhood = 3.0 * p.h;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.cap_flux_margin = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
}

TEST_CASE("delta neighborhoods") {
  const double h = 1.0 / 32.0;
  std::vector<SingularComponent> one{point_component(Vec3::Zero(), 0.1)};
  CHECK(default_delta(one, h, 0.0) == doctest::Approx(6.0 * h));
  std::vector<SingularComponent> two{point_component(Vec3::Zero(), 0.1),
                                     point_component(Vec3(0, 0, 4.0), 0.1)};
  CHECK(default_delta(two, h, 0.0) == doctest::Approx(0.4));
  CHECK(default_delta(two, h, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(default_delta(two, h, 2.0), ConfigError);
  CHECK(distance_to_singular_set(Vec3(0, 0, 3.0), two) == doctest::Approx(1.0));

  SingularComponent curve = point_component(Vec3(0, 0, -1), 0.1);
  curve.points.push_back(curve.points[0]);
  curve.points[1].position = Vec3(0, 0, 1);
  curve.geometry = Geometry::curve;
  curve.curve_polyline = {Vec3(0, 0, -1), Vec3(0, 0, 1)};
  CHECK(distance_to_singular_set(Vec3(0.5, 0, 0.3), {curve}) == doctest::Approx(0.5));
}

TEST_CASE("point cloud Hausdorff distance") {
  const std::vector<Vec3> a{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const std::vector<Vec3> b{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(3, 0, 0)};
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(a, b) == doctest::Approx(2.0));
  CHECK(hausdorff_distance(b, a) == doctest::Approx(2.0));
  CHECK(hausdorff_distance({}, {}) == 0.0);
  CHECK(hausdorff_distance(a, {}) == std::numeric_limits<double>::infinity());
}

TEST_CASE("level set Hausdorff distance of concentric spheres") {
  const double h = 1.0 / 16.0;
  const UniformGrid g = lsflab::test::cube(1.5, h);
  const ScalarField a = lsflab::test::sample(g, [](const Vec3& x) { return 1.0 - x.norm(); });
  const ScalarField b = lsflab::test::sample(g, [](const Vec3& x) { return 1.03 - x.norm(); });
  const auto pts = level_set_points(a, 0.2);
  REQUIRE(pts.size() > 100);
  for (const auto& p : pts) CHECK(std::abs(p.norm() - 0.8) <= 0.05 * h);
  CHECK(level_set_hausdorff(a, a, 0.2) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(level_set_hausdorff(a, b, 0.2) == doctest::Approx(0.03).epsilon(0.02));
  CHECK(level_set_hausdorff(a, b, 5.0) == 0.0);
}

TEST_CASE("regular interval check") {
  const double h = 1.0 / 16.0;
  const ShapeSpec s = preset("sphere");
  const ScalarField f0 = generate_sdf(s, default_grid(s, h));
  PerturbationSpec pert;
  pert.amplitude = 0.02;
  const ScalarField f1 = perturb_field(f0, s, pert);
  const ArrivalResult r0 = solve_parabolic(f0, SolveConfig{});
  const ArrivalResult r1 = solve_parabolic(f1, SolveConfig{});
  std::vector<SingularComponent> base{point_component(Vec3::Zero(), r0.extinction_time)};
  CHECK_THROWS_AS(regular_interval_check(r0.u, r1.u, 0.1, 0.3, base, {}), PreconditionError);
  CHECK_THROWS_AS(regular_interval_check(r0.u, r1.u, 0.2, 0.1, base, {}), PreconditionError);
  const auto res = regular_interval_check(r0.u, r1.u, 0.0, 0.2, base, {});
  CHECK(res.levels.size() == 5);
  CHECK(res.perturbed_critical_in_interval == 0);
  CHECK(res.gap > 0.0);
  CHECK(res.gap <= 3.0 * pert.amplitude);
  const auto one = regular_interval_check(r0.u, r1.u, 0.0, 0.2, base, {}, {0.1, 0.5});
  CHECK(one.levels == std::vector<double>{0.1});
}

TEST_CASE("sphere experiment rows") {
  const StabilityReport rep = run_experiment(sphere_plan(1.0 / 16.0));
  REQUIRE(rep.rows.size() == 4);
  REQUIRE(rep.baseline_components.size() == 1);
  CHECK(rep.delta == doctest::Approx(6.0 / 16.0));
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    CHECK_FALSE(row.failed);
    CHECK(row.containment_pass);
    REQUIRE(row.type_match.size() == 1);
    CHECK(row.type_match[0] == Match::yes);
    CHECK(row.sup_u_gap < prev);
    prev = row.sup_u_gap;
  }
  const auto& zero = rep.rows.back();
  CHECK(zero.amplitude == 0.0);
  CHECK(zero.sup_u_gap == 0.0);
  CHECK(zero.sup_grad_gap_offS == 0.0);
  CHECK(zero.extinction_gap == 0.0);
  // Halving the amplitude roughly halves the gap.
  for (std::size_t i = 1; i + 1 < rep.rows.size(); ++i) {
    const double ratio = rep.rows[i].sup_u_gap / rep.rows[i - 1].sup_u_gap;
    CHECK(ratio >= 0.35);
    CHECK(ratio <= 0.65);
  }
}

}  // TEST_SUITE
