#pragma once

// Point stencils shared by the serial and OpenMP kernel variants.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "lsflab/grid.hpp"

namespace lsflab::kernels::detail {

struct Stencil {
  std::size_t sx, sy, sz;
  double h;
};

inline void derivs(const double* f, std::size_t i, const Stencil& s, double g[3],
                   double H[6]) {
  const double c = f[i];
  const double i2h = 0.5 / s.h;
  const double ih2 = 1.0 / (s.h * s.h);
  const double q = 0.25 * ih2;
  const double xp = f[i + s.sx], xm = f[i - s.sx];
  const double yp = f[i + s.sy], ym = f[i - s.sy];
  const double zp = f[i + s.sz], zm = f[i - s.sz];
  g[0] = (xp - xm) * i2h;
  g[1] = (yp - ym) * i2h;
  g[2] = (zp - zm) * i2h;
  H[0] = (xp - 2.0 * c + xm) * ih2;
  H[1] = (yp - 2.0 * c + ym) * ih2;
  H[2] = (zp - 2.0 * c + zm) * ih2;
  H[3] = q * (f[i + s.sx + s.sy] - f[i + s.sx - s.sy] - f[i - s.sx + s.sy] + f[i - s.sx - s.sy]);
  H[4] = q * (f[i + s.sx + s.sz] - f[i + s.sx - s.sz] - f[i - s.sx + s.sz] + f[i - s.sx - s.sz]);
  H[5] = q * (f[i + s.sy + s.sz] - f[i + s.sy - s.sz] - f[i - s.sy + s.sz] + f[i - s.sy - s.sz]);
}

inline double quad(const double g[3], const double H[6]) {
  return g[0] * g[0] * H[0] + g[1] * g[1] * H[1] + g[2] * g[2] * H[2] +
         2.0 * (g[0] * g[1] * H[3] + g[0] * g[2] * H[4] + g[1] * g[2] * H[5]);
}

inline double mcf_point(const double* psi, std::size_t i, const Stencil& s, double dt,
                        double delta) {
  double g[3], H[6];
  derivs(psi, i, s, g, H);
  const double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
  const double lap = H[0] + H[1] + H[2];
  return psi[i] + dt * (lap - quad(g, H) / (g2 + delta * delta));
}

inline double reinit_point(const double* psi, const double* psi0, std::size_t i,
                           const Stencil& s, double dtau) {
  const double c = psi[i];
  const double s0 = psi0[i] / std::sqrt(psi0[i] * psi0[i] + s.h * s.h);
  const std::size_t st[3] = {s.sx, s.sy, s.sz};
  double acc = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double dm = (c - psi[i - st[a]]) / s.h;
    const double dp = (psi[i + st[a]] - c) / s.h;
    if (s0 > 0.0) {
      const double x = std::max(dm, 0.0), y = std::min(dp, 0.0);
      acc += std::max(x * x, y * y);
    } else {
      const double x = std::min(dm, 0.0), y = std::max(dp, 0.0);
      acc += std::max(x * x, y * y);
    }
  }
  const double next = c - dtau * s0 * (std::sqrt(acc) - 1.0);
  // Reinitialization never changes the sign of a node.
  if ((next < 0.0) != (c < 0.0)) return c;
  return next;
}

inline double elliptic_point(const double* u, std::size_t i, const Stencil& s, double eps) {
  double g[3], H[6];
  derivs(u, i, s, g, H);
  const double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
  return 1.0 + (H[0] + H[1] + H[2]) - quad(g, H) / (g2 + eps * eps);
}

inline Stencil stencil_of(const lsflab::UniformGrid& g) {
  const std::size_t nx = static_cast<std::size_t>(g.nx());
  const std::size_t ny = static_cast<std::size_t>(g.ny());
  return Stencil{1, nx, nx * ny, g.h()};
}

}  // namespace lsflab::kernels::detail
