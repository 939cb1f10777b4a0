#include "lsflab/diffops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace lsflab {

Vec3 central_gradient(const ScalarField& f, const Node& n) {
  const auto& g = f.grid;
  const double s = 0.5 / g.h();
  return Vec3(s * (f.at(n.i + 1, n.j, n.k) - f.at(n.i - 1, n.j, n.k)),
              s * (f.at(n.i, n.j + 1, n.k) - f.at(n.i, n.j - 1, n.k)),
              s * (f.at(n.i, n.j, n.k + 1) - f.at(n.i, n.j, n.k - 1)));
}

Jet2 jet2_unchecked(const ScalarField& f, const Node& n) {
  const double h = f.grid.h();
  const double ih2 = 1.0 / (h * h);
  Jet2 jet;
  const double c = f.at(n);
  jet.value = c;
  jet.gradient = central_gradient(f, n);
  const std::array<int, 3> p{n.i, n.j, n.k};
  auto val = [&](int di, int dj, int dk) {
    return f.at(p[0] + di, p[1] + dj, p[2] + dk);
  };
  jet.hessian(0, 0) = (val(1, 0, 0) - 2.0 * c + val(-1, 0, 0)) * ih2;
  jet.hessian(1, 1) = (val(0, 1, 0) - 2.0 * c + val(0, -1, 0)) * ih2;
  jet.hessian(2, 2) = (val(0, 0, 1) - 2.0 * c + val(0, 0, -1)) * ih2;
  const double q = 0.25 * ih2;
  const double hxy = q * (val(1, 1, 0) - val(1, -1, 0) - val(-1, 1, 0) + val(-1, -1, 0));
  const double hxz = q * (val(1, 0, 1) - val(1, 0, -1) - val(-1, 0, 1) + val(-1, 0, -1));
  const double hyz = q * (val(0, 1, 1) - val(0, 1, -1) - val(0, -1, 1) + val(0, -1, -1));
  jet.hessian(0, 1) = jet.hessian(1, 0) = hxy;
  jet.hessian(0, 2) = jet.hessian(2, 0) = hxz;
  jet.hessian(1, 2) = jet.hessian(2, 1) = hyz;
  return jet;
}

Jet2 jet2_at(const ScalarField& f, const Node& n) {
  if (!f.grid.contains(n) || f.grid.boundary_distance(n) < 2) {
    throw BoundaryError("stencil at node (" + std::to_string(n.i) + "," +
                        std::to_string(n.j) + "," + std::to_string(n.k) +
                        ") leaves the grid");
  }
  return jet2_unchecked(f, n);
}

namespace {

struct CellCoords {
  Node base;
  Vec3 w;
};

CellCoords locate(const UniformGrid& g, const Vec3& p, int clearance) {
  if (!g.contains(p, 1e-12 * g.h())) {
    throw DomainError("point outside the grid box");
  }
  const Vec3 q = (p - g.origin()) / g.h();
  CellCoords c;
  std::array<int, 3> b{};
  for (int a = 0; a < 3; ++a) {
    const int lo = clearance;
    const int hi = g.dims()[a] - 2 - clearance;
    if (hi < lo) throw BoundaryError("grid too small for interpolation stencil");
    int ia = static_cast<int>(std::floor(q[a]));
    if (ia < lo || ia > hi) {
      if (clearance > 0 && (q[a] < lo || q[a] > hi + 1)) {
        throw BoundaryError("interpolation stencil leaves the grid");
      }
      ia = std::clamp(ia, lo, hi);
    }
    b[a] = ia;
    c.w[a] = std::clamp(q[a] - ia, 0.0, 1.0);
  }
  c.base = Node{b[0], b[1], b[2]};
  return c;
}

}  // namespace

double trilinear_sample(const ScalarField& f, const Vec3& p) {
  const CellCoords c = locate(f.grid, p, 0);
  double acc = 0.0;
  for (int dk = 0; dk < 2; ++dk) {
    const double wz = dk ? c.w[2] : 1.0 - c.w[2];
    for (int dj = 0; dj < 2; ++dj) {
      const double wy = dj ? c.w[1] : 1.0 - c.w[1];
      for (int di = 0; di < 2; ++di) {
        const double wx = di ? c.w[0] : 1.0 - c.w[0];
        acc += wx * wy * wz * f.at(c.base.i + di, c.base.j + dj, c.base.k + dk);
      }
    }
  }
  return acc;
}

Jet2 jet2_interpolated(const ScalarField& f, const Vec3& p) {
  const CellCoords c = locate(f.grid, p, 1);
  Jet2 out;
  for (int dk = 0; dk < 2; ++dk) {
    const double wz = dk ? c.w[2] : 1.0 - c.w[2];
    for (int dj = 0; dj < 2; ++dj) {
      const double wy = dj ? c.w[1] : 1.0 - c.w[1];
      for (int di = 0; di < 2; ++di) {
        const double wx = di ? c.w[0] : 1.0 - c.w[0];
        const double w = wx * wy * wz;
        if (w == 0.0) continue;
        const Jet2 j = jet2_unchecked(f, Node{c.base.i + di, c.base.j + dj, c.base.k + dk});
        out.value += w * j.value;
        out.gradient += w * j.gradient;
        out.hessian += w * j.hessian;
      }
    }
  }
  out.value = trilinear_sample(f, p);
  return out;
}

std::array<Vec3, 2> tangent_frame(const Vec3& n) {
  int a = 0;
  if (std::abs(n[1]) < std::abs(n[a])) a = 1;
  if (std::abs(n[2]) < std::abs(n[a])) a = 2;
  Vec3 e = Vec3::Zero();
  e[a] = 1.0;
  Vec3 t1 = (e - n.dot(e) * n).normalized();
  Vec3 t2 = n.cross(t1);
  return {t1, t2};
}

Mat3 projected_shape_operator(const Jet2& jet) {
  const double gn = jet.gradient.norm();
  const Vec3 n = jet.gradient / gn;
  const Mat3 P = Mat3::Identity() - n * n.transpose();
  Mat3 S = -(P * jet.hessian * P) / gn;
  return 0.5 * (S + S.transpose());
}

LevelSetGeometry level_set_geometry(const Jet2& jet, double g_min) {
  LevelSetGeometry geo;
  geo.grad_norm = jet.gradient.norm();
  if (!(geo.grad_norm >= g_min)) {
    throw DegenerateGradientError("gradient below fence; node is near-critical");
  }
  geo.normal = jet.gradient / geo.grad_norm;
  const Mat3 S = projected_shape_operator(jet);
  geo.H = S.trace();
  const auto t = tangent_frame(geo.normal);
  Eigen::Matrix2d T;
  T(0, 0) = t[0].dot(S * t[0]);
  T(1, 1) = t[1].dot(S * t[1]);
  T(0, 1) = T(1, 0) = 0.5 * (t[0].dot(S * t[1]) + t[1].dot(S * t[0]));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(T, Eigen::EigenvaluesOnly);
  geo.k1 = es.eigenvalues()[0];
  geo.k2 = es.eigenvalues()[1];
  return geo;
}

double level_set_mean_curvature(const ScalarField& f, const Node& n) {
  return level_set_geometry(jet2_at(f, n), gradient_fence(f.grid.h())).H;
}

std::array<double, 2> level_set_principal_curvatures(const ScalarField& f, const Node& n) {
  const auto g = level_set_geometry(jet2_at(f, n), gradient_fence(f.grid.h()));
  return {g.k1, g.k2};
}

Jet2 jet2_fit(const ScalarField& f, const Node& c, double radius) {
  const auto& g = f.grid;
  const int r = static_cast<int>(std::ceil(radius - 1e-12));
  if (g.boundary_distance(c) < r) throw BoundaryError("fit ball leaves the grid");
  std::vector<std::array<int, 3>> offs;
  for (int dk = -r; dk <= r; ++dk)
    for (int dj = -r; dj <= r; ++dj)
      for (int di = -r; di <= r; ++di) {
        if (di * di + dj * dj + dk * dk <= radius * radius + 1e-9) offs.push_back({di, dj, dk});
      }
  if (offs.size() < 10) throw PreconditionError("fit radius too small");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(offs.size()), 10);
  Eigen::VectorXd b(static_cast<Eigen::Index>(offs.size()));
  for (std::size_t m = 0; m < offs.size(); ++m) {
    const double x = offs[m][0], y = offs[m][1], z = offs[m][2];
    const auto row = static_cast<Eigen::Index>(m);
    A.row(row) << 1.0, x, y, z, x * x, y * y, z * z, x * y, x * z, y * z;
    b[row] = f.at(c.i + offs[m][0], c.j + offs[m][1], c.k + offs[m][2]);
  }
  const Eigen::VectorXd q = A.colPivHouseholderQr().solve(b);
  const double h = g.h();
  Jet2 j;
  j.value = q[0];
  j.gradient = Vec3(q[1], q[2], q[3]) / h;
  j.hessian << 2 * q[4], q[7], q[8], q[7], 2 * q[5], q[9], q[8], q[9], 2 * q[6];
  j.hessian /= h * h;
  return j;
}

}  // namespace lsflab
