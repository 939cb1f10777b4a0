#pragma once

#include <vector>

#include "lsflab/grid.hpp"
#include "lsflab/shapes.hpp"

namespace lsflab {

/// Coarea quadrature of the zero set of f: weights |grad f| delta(f) h^3
/// with the cosine delta of half-width 1.5h.
struct BandQuadrature {
  std::vector<Vec3> points;
  std::vector<double> weights;
  double area() const;
};
BandQuadrature band_quadrature(const ScalarField& f);

/// Max pairwise distance between sample points.
double sample_diameter(const std::vector<SurfaceSample>& samples);

/// Center x radius lattice shared by the area-ratio and entropy sups.
/// Radii are 2h * 2^(k / (2 * level)) up to 2 * diameter; higher levels
/// contain every radius of lower ones.
struct ScaleLattice {
  std::vector<Vec3> centers;
  std::vector<double> radii;
};
ScaleLattice make_lattice(const std::vector<SurfaceSample>& samples, const Vec3& centroid,
                          double h, double diameter, int level = 1);

struct AreaRatioResult {
  double sup = 0.0;
  double bound = 0.0;  ///< 2^{n-1} e^{K(D+1)} A
  bool within_bound = false;
};
/// Max over the lattice of area(surface within B_r(p)) / r^{n-1}.
AreaRatioResult area_ratio_sup(const BandQuadrature& q, const ScaleLattice& lattice,
                               double area, double diameter, double K);

/// Gaussian area of (surface - p)/r.
double gaussian_area(const BandQuadrature& q, const Vec3& p, double r);

struct EntropyResult {
  double value = 0.0;  ///< lattice max, a lower bound of the true sup
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};
/// refine = true adds a golden-section search in r around the best lattice
/// point (still a lower bound).
EntropyResult entropy(const BandQuadrature& q, const ScaleLattice& lattice, bool refine = false);

/// Lattice for a field: ray samples plus about `samples` strided interface
/// nodes, the centroid of each interior piece, and the focal points
/// p + nu 2/H of the samples. Writes the sample diameter if asked.
ScaleLattice field_lattice(const ScalarField& f, int samples = 200, int level = 1,
                           double* diameter = nullptr);

/// Entropy of the zero set of a field over field_lattice.
EntropyResult field_entropy(const ScalarField& f, int samples = 200, int level = 1,
                            bool refine = false);

/// (4 pi)^{-(n-1)/2} [2^{n-1} + sum_k e^{-4^{k-1}} 2^{(k+1)(n-1)}].
double shell_entropy_constant(int n);

struct NoncollapsingResult {
  bool pass = true;
  int worst_sample = -1;
  double worst_margin = 0.0;  ///< most negative signed violation found (0 if none)
};
/// Interior and exterior tangent balls of radius alpha/H at every sample,
/// probed at nodes inside the balls shrunk by 1.5h.
NoncollapsingResult noncollapsing_test(const std::vector<SurfaceSample>& samples,
                                       const ScalarField& f, double alpha);
/// Largest alpha (to bisection tolerance) passing the ball test.
double alpha_observed(const std::vector<SurfaceSample>& samples, const ScalarField& f,
                      double tol = 1e-3);

/// min over 2-planes W of tr((V^T G V)^{-1} V^T A V), V spanning W, for
/// symmetric A and SPD G. Net over plane normals plus pattern search.
double min_trace_over_2planes(const Mat3& A, const Mat3& G);

struct TwoConvexity {
  double min_k1k2 = 0.0;
  double beta_hat = 0.0;       ///< min (k1+k2)/H
  double max_disagreement = 0.0;
};
/// k1+k2 from sorted curvatures and from the min-trace formula over 64
/// rotated, non-orthonormal tangent bases. Throws NumericalError if they
/// differ by more than 1e-6.
TwoConvexity two_convexity_min(const std::vector<SurfaceSample>& samples);

struct MetricsReport {
  double alpha_observed = 0.0;
  double min_H = 0.0;
  double max_H = 0.0;
  double min_k1k2 = 0.0;
  double beta_hat = 0.0;
  double area = 0.0;
  double diameter = 0.0;
  double max_area_ratio = 0.0;
  double entropy = 0.0;
  bool area_ratio_within_bound = false;
  bool entropy_within_shell_bound = false;
};
MetricsReport compute_metrics(const ScalarField& f, int samples = 200);

}  // namespace lsflab
