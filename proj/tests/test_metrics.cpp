#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "lsflab/metrics.hpp"
#include "lsflab/shapes.hpp"

using namespace lsflab;

namespace {

ScalarField sphere_field(double r, double h) {
  ShapeSpec s = preset("sphere");
  s.params["radius"] = r;
  return generate_sdf(s, default_grid(s, h));
}

// lambda_1 + lambda_2 of the pencil (A, G), by Cholesky reduction.
double pencil_low_pair(const Mat3& A, const Mat3& G) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat3> es(A, G);
  return es.eigenvalues()[0] + es.eigenvalues()[1];
}

}  // namespace

TEST_SUITE("surface_metrics") {

TEST_CASE("min-trace functional against the generalized eigenproblem") {
  CHECK(min_trace_over_2planes(Vec3(1, 2, 3).asDiagonal(), Mat3::Identity()) ==
        doctest::Approx(3.0).epsilon(1e-12));
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Mat3 M, B;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        M(a, b) = N(rng);
        B(a, b) = N(rng);
      }
    const Mat3 A = 0.5 * (M + M.transpose());
    const Mat3 G = B * B.transpose() + 0.5 * Mat3::Identity();
    CHECK(std::abs(min_trace_over_2planes(A, G) - pencil_low_pair(A, G)) <= 1e-6);
  }
}

TEST_CASE("noncollapsing ball test on the unit sphere") {
  const ScalarField f = sphere_field(1.0, 1.0 / 32.0);
  const auto s = surface_samples(f, 100);
  CHECK(noncollapsing_test(s, f, 1.9).pass);
  const auto fail = noncollapsing_test(s, f, 2.2);
  CHECK_FALSE(fail.pass);
  CHECK(fail.worst_sample >= 0);
  CHECK(fail.worst_margin < 0.0);
  CHECK(noncollapsing_test(s, f, 1e-3).pass);
  CHECK_THROWS_AS(noncollapsing_test(s, f, 0.0), PreconditionError);
  const double a = alpha_observed(s, f);
  CHECK(a >= 1.9);
  CHECK(a < 2.2);
}

TEST_CASE("property: ball test is monotone in alpha") {
  const ShapeSpec db = preset("dumbbell");
  const ScalarField f = generate_sdf(db, default_grid(db, 1.0 / 16.0));
  const auto s = surface_samples(f, 60);
  bool failed_before = false;
  for (double alpha = 0.05; alpha < 3.0; alpha += 0.15) {
    const bool pass = noncollapsing_test(s, f, alpha).pass;
    if (failed_before) CHECK_FALSE(pass);
    failed_before = failed_before || !pass;
  }
  CHECK(failed_before);
}

TEST_CASE("area ratios") {
  const ScalarField f = sphere_field(1.0, 1.0 / 32.0);
  const auto s = surface_samples(f, 100);
  const auto q = band_quadrature(f);
  CHECK(q.area() == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.01));
  const double diam = sample_diameter(s);
  CHECK(diam == doctest::Approx(2.0).epsilon(0.01));
  const auto L = make_lattice(s, interior_centroid(f), f.grid.h(), diam);
  const auto ar = area_ratio_sup(q, L, q.area(), diam, 2.0);
  CHECK(ar.sup >= std::numbers::pi - 0.2);
  CHECK(ar.within_bound);
  CHECK(ar.bound == doctest::Approx(4.0 * std::exp(2.0 * (diam + 1.0)) * q.area()));
  CHECK(ar.sup >= q.area() / (diam * diam) * 0.99);
  // Saturated radii: ratio area / r^2, decreasing.
  ScaleLattice big;
  big.centers = {Vec3::Zero()};
  big.radii = {2.0 * diam, 3.0 * diam, 4.0 * diam};
  const auto sat1 = area_ratio_sup(q, big, q.area(), diam, 2.0);
  CHECK(sat1.sup == doctest::Approx(q.area() / (4.0 * diam * diam)));
  CHECK_THROWS_AS(area_ratio_sup(q, L, 0.0, diam, 2.0), ConfigError);
}

TEST_CASE("Gaussian area of round spheres") {
  const ScalarField f = sphere_field(1.0, 1.0 / 32.0);
  const auto q = band_quadrature(f);
  // F(S_R) = (R^2 / r^2) e^{-R^2 / (4 r^2)}, maximal at R/r = 2.
  for (double r : {0.3, 0.5, 0.8}) {
    const double x = 1.0 / (r * r);
    CHECK(gaussian_area(q, Vec3::Zero(), r) == doctest::Approx(x * std::exp(-x / 4.0)).epsilon(0.01));
  }
}

TEST_CASE("entropy of spheres and scale invariance") {
  const double e1 = field_entropy(sphere_field(1.0, 1.0 / 32.0)).value;
  CHECK(std::abs(e1 - 4.0 / std::numbers::e) <= 0.05);
  const double e_half = field_entropy(sphere_field(0.5, 1.0 / 32.0)).value;
  CHECK(std::abs(e_half - e1) <= 0.02);
  const double e_two = field_entropy(sphere_field(2.0, 1.0 / 16.0)).value;
  CHECK(std::abs(e_two - e1) <= 0.02);
  CHECK(e1 >= 1.0);
}

TEST_CASE("property: entropy is monotone under lattice refinement") {
  const ShapeSpec db = preset("dumbbell");
  const ScalarField f = generate_sdf(db, default_grid(db, 1.0 / 16.0));
  const auto q = band_quadrature(f);
  const auto s = surface_samples(f, 80);
  const double d = sample_diameter(s);
  double prev = 0.0;
  for (int level = 1; level <= 3; ++level) {
    const double e = entropy(q, make_lattice(s, interior_centroid(f), f.grid.h(), d, level)).value;
    CHECK(e >= prev - 1e-15);
    prev = e;
  }
  CHECK(entropy(q, make_lattice(s, interior_centroid(f), f.grid.h(), d), true).value >=
        entropy(q, make_lattice(s, interior_centroid(f), f.grid.h(), d)).value);
}

TEST_CASE("shell constant") {
  // Independent evaluation of the shell sum for n = 3.
  double sum = 4.0;
  for (int k = 1; k < 12; ++k) sum += std::exp(-std::pow(4.0, k - 1)) * std::pow(4.0, k + 1);
  CHECK(shell_entropy_constant(3) == doctest::Approx(sum / (4.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(shell_entropy_constant(3) == doctest::Approx(0.87999).epsilon(1e-4));
}

TEST_CASE("two-convexity on the sphere") {
  const auto s = surface_samples(sphere_field(1.0, 1.0 / 32.0), 100);
  const TwoConvexity tc = two_convexity_min(s);
  CHECK(tc.min_k1k2 == doctest::Approx(2.0).epsilon(0.02));
  CHECK(tc.beta_hat == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tc.max_disagreement <= 1e-6);
}

TEST_CASE("metrics report invariants on every preset") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ShapeSpec spec = preset(name);
    const MetricsReport m = compute_metrics(generate_sdf(spec, default_grid(spec, 1.0 / 16.0)), 80);
    CHECK(m.min_H > 0.0);
    CHECK(m.min_H <= m.max_H);
    CHECK(m.min_k1k2 > 0.0);
    CHECK(m.entropy >= 1.0 - 0.05);
    CHECK(m.max_area_ratio >= 0.95 * m.area / (m.diameter * m.diameter));
    CHECK(m.area_ratio_within_bound);
    CHECK(m.entropy_within_shell_bound);
    CHECK(m.alpha_observed > 0.0);
  }
}

TEST_CASE("frozen sphere report at h = 1/32") {
  const MetricsReport m = compute_metrics(sphere_field(1.0, 1.0 / 32.0));
  CHECK(m.min_H == doctest::Approx(2.0).epsilon(0.005));
  CHECK(m.alpha_observed == doctest::Approx(2.046).epsilon(0.005));
  CHECK(m.entropy == doctest::Approx(1.4703).epsilon(0.002));
  CHECK(m.area == doctest::Approx(12.5666).epsilon(0.001));
}

}  // TEST_SUITE
