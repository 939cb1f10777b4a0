#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "lsflab/components.hpp"
#include "lsflab/diffops.hpp"
#include "lsflab/redistance.hpp"
#include "lsflab/shapes.hpp"
#include "lsflab/stability.hpp"

using namespace lsflab;

namespace {

constexpr double kH = 1.0 / 32.0;

ScalarField field_of(const ShapeSpec& s, double h = kH) { return generate_sdf(s, default_grid(s, h)); }

ShapeSpec make(ShapeKind k, std::map<std::string, double> p) {
  ShapeSpec s;
  s.kind = k;
  s.params = std::move(p);
  return s;
}

// Zero crossing of f along x at y = z = 0, by bisection on the trilinear field.
double crossing_along_x(const ScalarField& f, double lo, double hi) {
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (trilinear_sample(f, Vec3(mid, 0, 0)) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("shapes") {

TEST_CASE("sphere field") {
  const ScalarField f = field_of(preset("sphere"));
  const Node c = f.grid.nearest(Vec3::Zero());
  CHECK(std::abs(f.at(c) + 1.0) <= 2.0 * kH);
  for (const auto& s : interface_samples(f)) CHECK(std::abs(s.point.norm() - 1.0) <= kH);
}

TEST_CASE("dumbbell neck has the requested radius") {
  const ShapeSpec s = make(ShapeKind::dumbbell,
                           {{"neck_radius", 0.15}, {"bulb_radius", 0.5}, {"bulb_separation", 1.4}});
  CHECK(revolution_profile(s, 0.0) == doctest::Approx(0.15 * 0.15));
  const ScalarField f = field_of(s);
  CHECK(std::abs(crossing_along_x(f, 0.0, 0.4) - 0.15) <= kH);
}

TEST_CASE("degenerate ellipsoid equals the sphere") {
  const ShapeSpec e = make(ShapeKind::ellipsoid, {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
  const ShapeSpec s = preset("sphere");
  const UniformGrid g = default_grid(s, kH);
  CHECK(max_abs_diff(generate_sdf(e, g), generate_sdf(s, g)) <= 1e-12);
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(preset("torus"), ConfigError);
  CHECK_THROWS_AS(make(ShapeKind::sphere, {{"radius", -1.0}}).validate(), ConfigError);
  CHECK_THROWS_AS(make(ShapeKind::sphere, {{"radius", 1.0}, {"a", 1.0}}).validate(), ConfigError);
  CHECK_THROWS_AS(make(ShapeKind::sphere, {}).validate(), ConfigError);
  CHECK_THROWS_AS(make(ShapeKind::dumbbell, {{"neck_radius", 0.5}, {"bulb_radius", 0.4},
                                             {"bulb_separation", 2.0}})
                      .validate(),
                  ConfigError);
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
}

TEST_CASE("config text round trip") {
  for (const auto& name : preset_names()) {
    const ShapeSpec s = preset(name);
    const ShapeSpec r = parse_shape_config(format_shape_config(s));
    CHECK(r.kind == s.kind);
    CHECK(r.params == s.params);
  }
  const ShapeSpec p = parse_shape_config("# comment\nkind = sphere\n\nradius=0.5  # half\n");
  CHECK(p.kind == ShapeKind::sphere);
  CHECK(p.param("radius") == 0.5);
  CHECK_THROWS_AS(parse_shape_config("radius=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_shape_config("kind=sphere\nradius=abc\n"), ConfigError);
}

TEST_CASE("property: shipped presets are mean-convex, two-convex, connected and contained") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ShapeSpec s = preset(name);
    const ScalarField f = field_of(s);
    const auto samples = interface_samples(f);
    REQUIRE(!samples.empty());
    const ConvexityCheck cc = convexity_check(samples);
    CHECK(cc.min_H > 0.0);
    CHECK(cc.min_k1k2 > 0.0);
    const Mask band = interface_nodes(f);
    CHECK(connected_components(band, 26).size() == 1);
    for (std::size_t i = 0; i < band.on.size(); ++i) {
      if (!band.on[i]) continue;
      CHECK(f.grid.boundary_distance(f.grid.node(i)) >= 4);
    }
    // |grad f| in [0.5, 2] inside the band of total width 6h.
    double gmin = 1e9, gmax = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const Node n = f.grid.node(i);
      if (std::abs(f[i]) >= 3.0 * kH || f.grid.boundary_distance(n) < 1) continue;
      const double g = central_gradient(f, n).norm();
      gmin = std::min(gmin, g);
      gmax = std::max(gmax, g);
    }
    CHECK(gmin >= 0.5);
    CHECK(gmax <= 2.0);
  }
}

TEST_CASE("surface samples carry the right curvatures") {
  const auto sph = surface_samples(field_of(preset("sphere")), 100);
  CHECK(sph.size() >= 50);
  for (const auto& s : sph) {
    CHECK(std::abs(s.H - 2.0) <= 0.05);
    CHECK(std::abs(s.k1 - 1.0) <= 0.05);
    CHECK(std::abs(s.k2 - 1.0) <= 0.05);
    CHECK(s.normal.dot(-s.point.normalized()) > 0.99);
  }

  const auto neck = interface_samples(field_of(preset("dumbbell")));
  int found = 0;
  for (const auto& s : neck) {
    if (std::abs(s.point.z()) > 0.5 * kH) continue;
    ++found;
    CHECK(s.k1 < 0.0);
    CHECK(s.k2 > 0.0);
    CHECK(s.k1 + s.k2 > 0.0);
  }
  CHECK(found > 0);

  const auto cap = interface_samples(field_of(preset("capsule")));
  found = 0;
  for (const auto& s : cap) {
    if (std::abs(s.point.z()) > 0.5) continue;
    ++found;
    CHECK(std::abs(s.k1) <= 0.1);
    CHECK(s.k2 == doctest::Approx(1.0 / 0.3).epsilon(0.05));
  }
  CHECK(found > 0);
}

TEST_CASE("surface sampling fails loudly off the surface") {
  const UniformGrid g = default_grid(preset("sphere"), 0.125);
  const ScalarField inside(g, -1.0);
  CHECK_THROWS(surface_samples(inside, 20));
}

TEST_CASE("perturbations") {
  const ShapeSpec sph = preset("sphere");
  const UniformGrid g = default_grid(sph, kH);
  const ScalarField base = generate_sdf(sph, g);

  PerturbationSpec zero;
  zero.amplitude = 0.0;
  CHECK(perturb_sdf(sph, zero, g).values == base.values);

  PerturbationSpec bump;
  bump.amplitude = 0.02;
  const ScalarField pf = perturb_sdf(sph, bump, g);
  double worst = 0.0;
  for (const auto& s : interface_samples(pf)) worst = std::max(worst, std::abs(s.point.norm() - 1.0));
  CHECK(worst <= 0.03);
  CHECK(worst > 0.005);

  // Continuity in the amplitude.
  const ScalarField w = perturbation_profile(sph, bump, g);
  double wmax = 0.0;
  for (double v : w.values) wmax = std::max(wmax, std::abs(v));
  CHECK(max_abs_diff(pf, base) <= bump.amplitude * wmax * (1.0 + 1e-12));

  PerturbationSpec huge;
  huge.mode = PerturbationMode::low_frequency_wobble;
  huge.amplitude = 2.0;
  CHECK_THROWS_AS(perturb_sdf(sph, huge, g), ConfigError);
}

TEST_CASE("dumbbell wobble displacement is linear in the amplitude") {
  const ShapeSpec db = preset("dumbbell");
  const UniformGrid g = default_grid(db, kH);
  const ScalarField base = generate_sdf(db, g);
  PerturbationSpec w;
  w.mode = PerturbationMode::low_frequency_wobble;
  w.amplitude = 0.04;
  const double d1 = level_set_hausdorff(perturb_sdf(db, w, g), base, 0.0);
  w.amplitude = 0.02;
  const double d2 = level_set_hausdorff(perturb_sdf(db, w, g), base, 0.0);
  CHECK(d1 > 0.0);
  CHECK(d2 / d1 >= 0.4);
  CHECK(d2 / d1 <= 0.6);
}

}  // TEST_SUITE
