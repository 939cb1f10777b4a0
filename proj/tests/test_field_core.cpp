#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "lsflab/components.hpp"
#include "lsflab/diffops.hpp"
#include "lsflab/grid.hpp"

using namespace lsflab;
using lsflab::test::cube;
using lsflab::test::sample;

TEST_SUITE("field_core") {

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(UniformGrid({4, 5, 5}, Vec3::Zero(), 0.1), ConfigError);
  CHECK_THROWS_AS(UniformGrid({5, 5, 5}, Vec3::Zero(), 0.0), ConfigError);
  CHECK_THROWS_AS(UniformGrid({5, 5, 5}, Vec3::Zero(), -1.0), ConfigError);
  const UniformGrid g({6, 7, 8}, Vec3(1, 2, 3), 0.5);
  CHECK(g.size() == 6u * 7u * 8u);
  CHECK(g.upper().isApprox(Vec3(1 + 2.5, 2 + 3.0, 3 + 3.5)));
  for (std::size_t idx : {0ul, 17ul, g.size() - 1}) CHECK(g.index(g.node(idx)) == idx);
  CHECK(g.index(1, 0, 0) == 1u);
  CHECK(g.index(0, 1, 0) == 6u);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(3, 0.0)), ConfigError);
}

TEST_CASE("non-finite values are rejected") {
  ScalarField f(cube(1.0, 0.25));
  CHECK_NOTHROW(f.check_finite());
  f[10] = std::nan("");
  CHECK_THROWS_AS(f.check_finite(), NumericalError);
}

TEST_CASE("jet2_at: constant, affine and quadratic exactness") {
  const UniformGrid g = cube(1.0, 0.1);
  const Vec3 a(0.3, -1.2, 2.5);
  const ScalarField c = sample(g, [](const Vec3&) { return 4.2; });
  const ScalarField lin = sample(g, [&](const Vec3& x) { return 0.7 + a.dot(x); });
  const ScalarField quad = sample(g, [](const Vec3& x) { return 0.5 * x.squaredNorm(); });
  const Mat3 A = (Mat3() << 2, 0.3, -1, 0.3, -1, 0.5, -1, 0.5, 3).finished();
  const ScalarField gq = sample(g, [&](const Vec3& x) { return 0.5 * x.dot(A * x) + a.dot(x); });
  for (const Node& n : {Node{2, 2, 2}, Node{10, 7, 13}, Node{18, 18, 18}}) {
    const Jet2 jc = jet2_at(c, n);
    CHECK(jc.gradient.norm() == doctest::Approx(0.0));
    CHECK(jc.hessian.norm() == doctest::Approx(0.0));
    const Jet2 jl = jet2_at(lin, n);
    CHECK((jl.gradient - a).norm() < 1e-10);
    CHECK(jl.hessian.norm() < 1e-9);
    const Jet2 jq = jet2_at(quad, n);
    CHECK((jq.hessian - Mat3::Identity()).norm() < 1e-10);
    const Jet2 jg = jet2_at(gq, n);
    CHECK((jg.hessian - A).norm() < 1e-9);
    CHECK((jg.hessian - jg.hessian.transpose()).norm() <= 1e-12);
    CHECK((jg.gradient - (A * g.position(n) + a)).norm() < 1e-9);
  }
}

TEST_CASE("jet2_at needs two nodes of clearance") {
  const ScalarField f(cube(1.0, 0.25));
  CHECK_THROWS_AS(jet2_at(f, Node{1, 4, 4}), BoundaryError);
  CHECK_THROWS_AS(jet2_at(f, Node{4, 4, f.grid.nz() - 2}), BoundaryError);
  CHECK_NOTHROW(jet2_at(f, Node{2, 2, 2}));
}

TEST_CASE("mean curvature of spheres, cylinders and planes") {
  const UniformGrid g = cube(1.5, 1.0 / 32.0);
  const ScalarField dist = sample(g, [](const Vec3& x) { return x.norm(); });
  const ScalarField inward = sample(g, [](const Vec3& x) { return -x.norm(); });
  const ScalarField cyl = sample(g, [](const Vec3& x) { return std::hypot(x.x(), x.y()); });
  const ScalarField plane = sample(g, [](const Vec3& x) { return x.x() - 2.0 * x.z(); });
  const Node n = g.nearest(Vec3(1.0, 0.0, 0.0));
  REQUIRE((g.position(n) - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK(level_set_mean_curvature(dist, n) == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(level_set_mean_curvature(inward, n) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(std::abs(level_set_mean_curvature(cyl, n)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(level_set_mean_curvature(plane, n) == doctest::Approx(0.0));

  const auto ks = level_set_principal_curvatures(inward, n);
  CHECK(ks[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ks[1] == doctest::Approx(1.0).epsilon(1e-3));
  const ScalarField cyl_in = sample(g, [](const Vec3& x) { return -std::hypot(x.x(), x.y()); });
  const auto kc = level_set_principal_curvatures(cyl_in, n);
  CHECK(kc[0] == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(kc[1] == doctest::Approx(1.0).epsilon(1e-3));
  const auto kp = level_set_principal_curvatures(plane, n);
  CHECK(std::abs(kp[0]) < 1e-9);
  CHECK(std::abs(kp[1]) < 1e-9);
}

TEST_CASE("degenerate gradient is fenced") {
  const UniformGrid g = cube(1.0, 0.1);
  const ScalarField c = sample(g, [](const Vec3&) { return 1.0; });
  CHECK_THROWS_AS(level_set_mean_curvature(c, Node{10, 10, 10}), DegenerateGradientError);
  CHECK(gradient_fence(0.1) == doctest::Approx(1e-5));
}

TEST_CASE("property: H is the trace of the projected operator, normal eigenvalue 0") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Jet2 j;
    j.gradient = Vec3(N(rng), N(rng), N(rng));
    Mat3 M;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) M(a, b) = N(rng);
    j.hessian = 0.5 * (M + M.transpose());
    const LevelSetGeometry geo = level_set_geometry(j, 1e-9);
    const Mat3 S = projected_shape_operator(j);
    CHECK(std::abs(S.trace() - geo.H) < 1e-8);
    CHECK((S * geo.normal).norm() < 1e-8);
    CHECK(std::abs(geo.k1 + geo.k2 - geo.H) < 1e-8);
    CHECK(geo.k1 <= geo.k2);
  }
}

TEST_CASE("trilinear_sample") {
  const UniformGrid g = cube(1.0, 0.1);
  const Vec3 a(0.4, -0.9, 1.7);
  const ScalarField lin = sample(g, [&](const Vec3& x) { return 1.0 + a.dot(x); });
  const ScalarField sq = sample(g, [](const Vec3& x) { return x.squaredNorm(); });
  CHECK(trilinear_sample(sq, g.position(3, 8, 11)) == sq.at(3, 8, 11));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.95, 0.95);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(U(rng), U(rng), U(rng));
    CHECK(std::abs(trilinear_sample(lin, p) - (1.0 + a.dot(p))) < 1e-12);
  }
  const Vec3 center = g.position(4, 6, 9) + Vec3::Constant(0.05);
  // Cell center: (h/2)^2 per axis.
  CHECK(trilinear_sample(sq, center) - center.squaredNorm() == doctest::Approx(0.75 * 0.1 * 0.1));
  const Vec3 face = g.position(4, 6, 9) + Vec3(0.05, 0.05, 0.0);
  CHECK(trilinear_sample(sq, face) - face.squaredNorm() <= 0.1 * 0.1 / 2.0 + 1e-12);
  CHECK_THROWS_AS(trilinear_sample(sq, Vec3(1.5, 0, 0)), DomainError);
}

TEST_CASE("connected components") {
  const UniformGrid g = cube(1.0, 0.1);
  Mask empty(g);
  CHECK(connected_components(empty, 6).empty());
  Mask two(g);
  two.on[g.index(2, 2, 2)] = 1;
  two.on[g.index(10, 10, 10)] = 1;
  CHECK(connected_components(two, 26).size() == 2);
  Mask diag(g);
  diag.on[g.index(5, 5, 5)] = 1;
  diag.on[g.index(6, 6, 6)] = 1;
  CHECK(connected_components(diag, 6).size() == 2);
  CHECK(connected_components(diag, 26).size() == 1);
  CHECK_THROWS_AS(connected_components(diag, 18), ConfigError);

  Mask ball(g);
  for (std::size_t i = 0; i < g.size(); ++i) ball.on[i] = g.position(i).norm() <= 0.5 + 1e-12;
  const auto comps = connected_components(ball, 6);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].size() == ball.count());
}

TEST_CASE("property: components partition the mask, labels ordered by first index") {
  const UniformGrid g({12, 11, 10}, Vec3::Zero(), 1.0);
  std::mt19937_64 rng(11);
  std::bernoulli_distribution B(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    Mask m(g);
    for (auto& v : m.on) v = B(rng);
    for (int adj : {6, 26}) {
      const auto comps = connected_components(m, adj);
      std::vector<int> seen(g.size(), 0);
      std::size_t total = 0;
      std::size_t prev_first = 0;
      for (std::size_t c = 0; c < comps.size(); ++c) {
        CHECK(std::is_sorted(comps[c].begin(), comps[c].end()));
        if (c > 0) CHECK(comps[c].front() > prev_first);
        prev_first = comps[c].front();
        for (std::size_t idx : comps[c]) {
          CHECK(m.on[idx]);
          ++seen[idx];
        }
        total += comps[c].size();
      }
      CHECK(total == m.count());
      CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s <= 1; }));
    }
  }
}

TEST_CASE("LSF1 round trip and layout") {
  const UniformGrid g({5, 6, 7}, Vec3(-1, 0.5, 2), 0.125);
  ScalarField f = sample(g, [](const Vec3& x) { return x.x() * 3 + x.y() - x.z() * x.z(); });
  const auto path = std::filesystem::temp_directory_path() / "lsflab_roundtrip.lsf1";
  write_lsf1(path, f);
  CHECK(std::filesystem::file_size(path) == 8 + 3 * 8 + 3 * 8 + 8 + g.size() * 8);
  const ScalarField r = read_lsf1(path);
  CHECK(r.grid == g);
  CHECK(r.values == f.values);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_lsf1(path), ConfigError);
}

}  // TEST_SUITE
