#pragma once

#include <array>

#include "lsflab/grid.hpp"

namespace lsflab {

/// Second-order local expansion of a field at a point.
struct Jet2 {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};

/// Level-set geometry at a point, normal n = grad f / |grad f|.
struct LevelSetGeometry {
  Vec3 normal = Vec3::Zero();
  double grad_norm = 0.0;
  double H = 0.0;
  double k1 = 0.0;  ///< k1 <= k2
  double k2 = 0.0;
};

/// Gradient-magnitude fence below which a node counts as near-critical.
inline double gradient_fence(double h) { return 1e-6 / h; }

/// Central-difference jet; requires the node >= 2 nodes from every face.
Jet2 jet2_at(const ScalarField& field, const Node& node);

/// Same stencil, only one node of clearance required. Used internally.
Jet2 jet2_unchecked(const ScalarField& field, const Node& node);

/// Trilinear blend of the node jets of the cell containing p.
Jet2 jet2_interpolated(const ScalarField& field, const Vec3& p);

/// Mean curvature -div(grad f/|grad f|).
double level_set_mean_curvature(const ScalarField& field, const Node& node);

/// Sorted principal curvatures of the level set through the node.
std::array<double, 2> level_set_principal_curvatures(const ScalarField& field,
                                                     const Node& node);

/// Geometry of the level set of a jet. Throws DegenerateGradientError when
/// |grad| < g_min.
LevelSetGeometry level_set_geometry(const Jet2& jet, double g_min);

/// Projected operator -P (hess f) P / |grad f|, whose trace is H.
Mat3 projected_shape_operator(const Jet2& jet);

/// Unit vectors t1, t2 completing n to a right-handed orthonormal frame.
std::array<Vec3, 2> tangent_frame(const Vec3& n);

/// Least-squares quadratic over the nodes within `radius` (in units of h) of
/// c. Smooths isolated node errors that the 3-point stencil passes through.
Jet2 jet2_fit(const ScalarField& field, const Node& c, double radius = 2.0);

double trilinear_sample(const ScalarField& field, const Vec3& p);

/// Central-difference gradient at a node with one node of clearance.
Vec3 central_gradient(const ScalarField& field, const Node& node);

}  // namespace lsflab
