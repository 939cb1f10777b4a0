#pragma once

#include "lsflab/kernels.hpp"

namespace lsflab::kernels {

void mcf_step_reference(const UniformGrid& g, const double* psi, double* out,
                        const std::vector<std::size_t>& nodes, double dt, double delta);
void reinit_step_reference(const UniformGrid& g, const double* psi, const double* psi0,
                           double* out, const std::vector<std::size_t>& nodes,
                           const std::vector<std::uint8_t>& frozen, double dtau);
void elliptic_residual_reference(const UniformGrid& g, const double* u, double* r,
                                 const std::vector<std::size_t>& nodes, double eps);

}  // namespace lsflab::kernels
