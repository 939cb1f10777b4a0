#include "lsflab/components.hpp"

#include <algorithm>

namespace lsflab {

std::vector<std::array<int, 3>> neighbor_offsets(int adjacency) {
  std::vector<std::array<int, 3>> off;
  if (adjacency == 6) {
    off = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  } else if (adjacency == 26) {
    for (int k = -1; k <= 1; ++k)
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i)
          if (i || j || k) off.push_back({i, j, k});
  } else {
    throw ConfigError("adjacency must be 6 or 26");
  }
  return off;
}

std::vector<std::vector<std::size_t>> connected_components(const Mask& mask, int adjacency) {
  const auto off = neighbor_offsets(adjacency);
  const UniformGrid& g = mask.grid;
  std::vector<std::uint8_t> seen(mask.on.size(), 0);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < mask.on.size(); ++s) {
    if (!mask.on[s] || seen[s]) continue;
    std::vector<std::size_t> comp;
    stack.assign(1, s);
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      comp.push_back(c);
      const Node n = g.node(c);
      for (const auto& o : off) {
        const Node m{n.i + o[0], n.j + o[1], n.k + o[2]};
        if (!g.contains(m)) continue;
        const std::size_t mi = g.index(m);
        if (mask.on[mi] && !seen[mi]) {
          seen[mi] = 1;
          stack.push_back(mi);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace lsflab
