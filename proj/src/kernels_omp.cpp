#include "kernels_point.hpp"
#include "kernels_reference.hpp"

namespace lsflab::kernels {

namespace {

void mcf_step_omp(const UniformGrid& g, const double* psi, double* out,
                  const std::vector<std::size_t>& nodes, double dt, double delta) {
  const auto s = detail::stencil_of(g);
  const auto n = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[nodes[k]] = detail::mcf_point(psi, nodes[k], s, dt, delta);
  }
}

void reinit_step_omp(const UniformGrid& g, const double* psi, const double* psi0, double* out,
                     const std::vector<std::size_t>& nodes,
                     const std::vector<std::uint8_t>& frozen, double dtau) {
  const auto s = detail::stencil_of(g);
  const auto n = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::size_t i = nodes[k];
    out[i] = frozen[i] ? psi[i] : detail::reinit_point(psi, psi0, i, s, dtau);
  }
}

void elliptic_residual_omp(const UniformGrid& g, const double* u, double* r,
                           const std::vector<std::size_t>& nodes, double eps) {
  const auto s = detail::stencil_of(g);
  const auto n = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) r[k] = detail::elliptic_point(u, nodes[k], s, eps);
}

}  // namespace

void mcf_step(Backend b, const UniformGrid& g, const double* psi, double* out,
              const std::vector<std::size_t>& nodes, double dt, double delta) {
  if (b == Backend::reference) {
    mcf_step_reference(g, psi, out, nodes, dt, delta);
  } else {
    mcf_step_omp(g, psi, out, nodes, dt, delta);
  }
}

void reinit_step(Backend b, const UniformGrid& g, const double* psi, const double* psi0,
                 double* out, const std::vector<std::size_t>& nodes,
                 const std::vector<std::uint8_t>& frozen, double dtau) {
  if (b == Backend::reference) {
    reinit_step_reference(g, psi, psi0, out, nodes, frozen, dtau);
  } else {
    reinit_step_omp(g, psi, psi0, out, nodes, frozen, dtau);
  }
}

void elliptic_residual(Backend b, const UniformGrid& g, const double* u, double* r,
                       const std::vector<std::size_t>& nodes, double eps) {
  if (b == Backend::reference) {
    elliptic_residual_reference(g, u, r, nodes, eps);
  } else {
    elliptic_residual_omp(g, u, r, nodes, eps);
  }
}

}  // namespace lsflab::kernels
