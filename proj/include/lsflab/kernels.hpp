#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lsflab/grid.hpp"

namespace lsflab::kernels {

/// Per-node arithmetic is identical in both variants, so results are bitwise
/// equal for any thread count.
enum class Backend { reference, openmp };

/// One explicit level-set curvature-flow step on the listed nodes:
/// out = psi + dt * (lap psi - g^T (hess psi) g / (|g|^2 + delta^2)).
/// Every listed node needs one node of clearance from the boundary.
void mcf_step(Backend b, const UniformGrid& g, const double* psi, double* out,
              const std::vector<std::size_t>& nodes, double dt, double delta);

/// One Jacobi pseudo-time iteration of psi_tau = -S(psi0) (|grad psi| - 1)
/// with Godunov upwinding. Nodes with frozen[i] != 0 are copied.
void reinit_step(Backend b, const UniformGrid& g, const double* psi, const double* psi0,
                 double* out, const std::vector<std::size_t>& nodes,
                 const std::vector<std::uint8_t>& frozen, double dtau);

/// Residual of the regularized arrival-time operator on the listed nodes:
/// r = 1 + (I - p p^T / (|p|^2 + eps^2)) : hess u.
void elliptic_residual(Backend b, const UniformGrid& g, const double* u, double* r,
                       const std::vector<std::size_t>& nodes, double eps);

}  // namespace lsflab::kernels
