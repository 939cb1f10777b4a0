#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsflab/diffops.hpp"
#include "lsflab/grid.hpp"

namespace lsflab {

enum class ShapeKind { sphere, ellipsoid, dumbbell, bumpy_dumbbell, capsule };

std::string to_string(ShapeKind k);
ShapeKind shape_kind_from_string(const std::string& s);

/// Closed initial surface. Every shape is centered at the origin; shapes of
/// revolution use the z-axis.
///
/// | kind           | parameters                                               |
/// |----------------|----------------------------------------------------------|
/// | sphere         | radius                                                   |
/// | ellipsoid      | a, b, c                                                  |
/// | dumbbell       | neck_radius, bulb_radius, bulb_separation                |
/// | bumpy_dumbbell | neck_radius, bulb_radius, large_bulb_radius,             |
/// |                | bulb_separation                                          |
/// | capsule        | radius, half_length                                      |
struct ShapeSpec {
  ShapeKind kind = ShapeKind::sphere;
  std::map<std::string, double> params;

  double param(const std::string& key) const;
  /// Throws ConfigError on missing/unknown keys or bad values.
  void validate() const;
  /// Axis-aligned bounds of the surface.
  std::pair<Vec3, Vec3> bounds() const;
};

enum class PerturbationMode { normal_bump, low_frequency_wobble };

std::string to_string(PerturbationMode m);
PerturbationMode perturbation_mode_from_string(const std::string& s);

struct PerturbationSpec {
  double amplitude = 0.0;
  PerturbationMode mode = PerturbationMode::normal_bump;
  int frequency = 2;
  double phase = 0.0;
};

/// Shipped presets: sphere, ellipsoid, dumbbell, bumpy_dumbbell, capsule.
ShapeSpec preset(const std::string& name);
std::vector<std::string> preset_names();

/// key=value text; `kind` selects the shape, every other key is a parameter.
/// Blank lines and '#' comments are ignored.
ShapeSpec parse_shape_config(const std::string& text);
std::string format_shape_config(const ShapeSpec& spec);

/// Bounds of the shape plus a margin of 8h, at spacing h.
UniformGrid default_grid(const ShapeSpec& spec, double h);

/// Approximate signed distance: negative inside, positive outside.
ScalarField generate_sdf(const ShapeSpec& spec, const UniformGrid& grid);

/// Profile radius squared P(z) for the shapes of revolution; the surface is
/// x^2 + y^2 = P(z).
double revolution_profile(const ShapeSpec& spec, double z);

/// The fixed unit-height profile w used by perturb_sdf.
ScalarField perturbation_profile(const ShapeSpec& base, const PerturbationSpec& pert,
                                 const UniformGrid& grid);

/// f_base + amplitude * w. Throws ConfigError if the perturbed zero set loses
/// a nonvanishing gradient.
ScalarField perturb_sdf(const ShapeSpec& base, const PerturbationSpec& pert,
                        const UniformGrid& grid);
ScalarField perturb_field(const ScalarField& base, const ShapeSpec& spec,
                          const PerturbationSpec& pert);

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;  ///< inward
  double k1 = 0.0;
  double k2 = 0.0;
  double H = 0.0;
  Jet2 jet;  ///< jet of -f at the point
};

/// Ray-cast samples from the centroid of {f < 0} along Fibonacci directions.
std::vector<SurfaceSample> surface_samples(const ScalarField& field, int count);

/// One sample per interface node, projected onto the zero set.
std::vector<SurfaceSample> interface_samples(const ScalarField& field);

/// Centroid of the nodes with f < 0.
Vec3 interior_centroid(const ScalarField& field);

/// Minimum of H and k1 + k2 over the samples.
struct ConvexityCheck {
  double min_H = 0.0;
  double max_H = 0.0;
  double min_k1k2 = 0.0;
  bool ok() const { return min_H > 0.0 && min_k1k2 > 0.0; }
};
ConvexityCheck convexity_check(const std::vector<SurfaceSample>& samples);

}  // namespace lsflab
