#pragma once

#include <cstddef>
#include <vector>

#include "lsflab/grid.hpp"

namespace lsflab {

/// Flood-fill partition of the set nodes of a mask. Components are ordered by
/// their smallest linear index; each node list is sorted ascending.
/// adjacency must be 6 or 26.
std::vector<std::vector<std::size_t>> connected_components(const Mask& mask, int adjacency);

/// Neighbor offsets for 6- or 26-adjacency.
std::vector<std::array<int, 3>> neighbor_offsets(int adjacency);

}  // namespace lsflab
