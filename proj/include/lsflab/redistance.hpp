#pragma once

#include "lsflab/grid.hpp"

namespace lsflab {

/// Signed distance to the zero set of f by fast sweeping (Godunov upwind,
/// eight sweep orders). Nodes adjacent to a sign change are seeded with
/// f/|grad f|; values beyond `cap` are clamped to +-cap.
ScalarField redistance(const ScalarField& f, double cap, int sweeps = 2);

/// Nodes with a 6-neighbor of opposite sign (or exactly zero).
Mask interface_nodes(const ScalarField& f);

}  // namespace lsflab
