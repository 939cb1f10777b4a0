#pragma once

#include <functional>

#include "lsflab/grid.hpp"

namespace lsflab::test {

inline ScalarField sample(const UniformGrid& g, const std::function<double(const Vec3&)>& f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.position(i));
  return out;
}

/// Cube [-half, half]^3 at spacing h.
inline UniformGrid cube(double half, double h) {
  return UniformGrid::covering(Vec3::Constant(-half), Vec3::Constant(half), h);
}

}  // namespace lsflab::test
