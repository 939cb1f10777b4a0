#include "lsflab/redistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lsflab {

Mask interface_nodes(const ScalarField& f) {
  const auto& g = f.grid;
  Mask m(g);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double v = f.at(i, j, k);
        bool cut = (v == 0.0);
        const int nb[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        for (const auto& o : nb) {
          const Node q{i + o[0], j + o[1], k + o[2]};
          if (!g.contains(q)) continue;
          if ((f.at(q) > 0.0) != (v > 0.0)) cut = true;
        }
        m.on[g.index(i, j, k)] = cut ? 1 : 0;
      }
  return m;
}

namespace {

double one_sided_gradient_norm(const ScalarField& f, const Node& n) {
  const auto& g = f.grid;
  Vec3 d;
  const std::array<int, 3> p{n.i, n.j, n.k};
  for (int a = 0; a < 3; ++a) {
    std::array<int, 3> lo = p, hi = p;
    lo[a] -= 1;
    hi[a] += 1;
    const bool hasl = lo[a] >= 0;
    const bool hash = hi[a] < g.dims()[a];
    const double c = f.at(n);
    if (hasl && hash) {
      d[a] = (f.at(hi[0], hi[1], hi[2]) - f.at(lo[0], lo[1], lo[2])) / (2.0 * g.h());
    } else if (hash) {
      d[a] = (f.at(hi[0], hi[1], hi[2]) - c) / g.h();
    } else {
      d[a] = (c - f.at(lo[0], lo[1], lo[2])) / g.h();
    }
  }
  return d.norm();
}

// Godunov update for |grad d| = 1 with neighbor minima a <= b <= c.
double godunov(double a, double b, double c, double h) {
  double x = a + h;
  if (x <= b) return x;
  const double s = a + b;
  x = 0.5 * (s + std::sqrt(std::max(0.0, s * s - 2.0 * (a * a + b * b - h * h))));
  if (x <= c) return x;
  const double t = a + b + c;
  const double q = a * a + b * b + c * c - h * h;
  return (t + std::sqrt(std::max(0.0, t * t - 3.0 * q))) / 3.0;
}

}  // namespace

ScalarField redistance(const ScalarField& f, double cap, int sweeps) {
  const auto& g = f.grid;
  const double h = g.h();
  const double inf = std::numeric_limits<double>::infinity();
  const Mask iface = interface_nodes(f);
  std::vector<double> d(g.size(), inf);
  std::vector<std::uint8_t> fixed(g.size(), 0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!iface.on[idx]) continue;
    const Node n = g.node(idx);
    const double gn = one_sided_gradient_norm(f, n);
    const double v = std::abs(f[idx]);
    d[idx] = gn > 1e-12 ? std::min(v / gn, h) : h;
    fixed[idx] = 1;
  }
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  auto get = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return inf;
    return d[g.index(i, j, k)];
  };
  for (int pass = 0; pass < sweeps; ++pass) {
    for (int o = 0; o < 8; ++o) {
      const int si = (o & 1) ? -1 : 1, sj = (o & 2) ? -1 : 1, sk = (o & 4) ? -1 : 1;
      for (int kk = 0; kk < nz; ++kk) {
        const int k = sk > 0 ? kk : nz - 1 - kk;
        for (int jj = 0; jj < ny; ++jj) {
          const int j = sj > 0 ? jj : ny - 1 - jj;
          for (int ii = 0; ii < nx; ++ii) {
            const int i = si > 0 ? ii : nx - 1 - ii;
            const std::size_t idx = g.index(i, j, k);
            if (fixed[idx]) continue;
            double m[3] = {std::min(get(i - 1, j, k), get(i + 1, j, k)),
                           std::min(get(i, j - 1, k), get(i, j + 1, k)),
                           std::min(get(i, j, k - 1), get(i, j, k + 1))};
            std::sort(m, m + 3);
            if (!std::isfinite(m[0])) continue;
            const double cand = godunov(m[0], m[1], m[2], h);
            if (cand < d[idx]) d[idx] = cand;
          }
        }
      }
    }
  }
  ScalarField out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    double v = std::min(d[idx], cap);
    if (!std::isfinite(v)) v = cap;
    out[idx] = f[idx] < 0.0 ? -v : v;
  }
  return out;
}

}  // namespace lsflab
