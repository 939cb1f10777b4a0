#include "kernels_point.hpp"
#include "kernels_reference.hpp"

namespace lsflab::kernels {

void mcf_step_reference(const UniformGrid& g, const double* psi, double* out,
                        const std::vector<std::size_t>& nodes, double dt, double delta) {
  const auto s = detail::stencil_of(g);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    out[nodes[n]] = detail::mcf_point(psi, nodes[n], s, dt, delta);
  }
}

void reinit_step_reference(const UniformGrid& g, const double* psi, const double* psi0,
                           double* out, const std::vector<std::size_t>& nodes,
                           const std::vector<std::uint8_t>& frozen, double dtau) {
  const auto s = detail::stencil_of(g);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const std::size_t i = nodes[n];
    out[i] = frozen[i] ? psi[i] : detail::reinit_point(psi, psi0, i, s, dtau);
  }
}

void elliptic_residual_reference(const UniformGrid& g, const double* u, double* r,
                                 const std::vector<std::size_t>& nodes, double eps) {
  const auto s = detail::stencil_of(g);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    r[n] = detail::elliptic_point(u, nodes[n], s, eps);
  }
}

}  // namespace lsflab::kernels
