#include "lsflab/metrics.hpp"
#include "lsflab/components.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/LU>

#include "lsflab/arrival.hpp"
#include "lsflab/diffops.hpp"

namespace lsflab {

double BandQuadrature::area() const {
  double a = 0.0;
  for (double w : weights) a += w;
  return a;
}

BandQuadrature band_quadrature(const ScalarField& f) {
  const auto& g = f.grid;
  const double h = g.h();
  const double eps = 1.5 * h;
  const double h3 = h * h * h;
  BandQuadrature q;
  for (int k = 1; k < g.nz() - 1; ++k)
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i) {
        const double v = f.at(i, j, k);
        if (std::abs(v) >= eps) continue;
        const double delta = (1.0 + std::cos(std::numbers::pi * v / eps)) / (2.0 * eps);
        const double gn = central_gradient(f, Node{i, j, k}).norm();
        q.points.push_back(g.position(i, j, k));
        q.weights.push_back(gn * delta * h3);
      }
  return q;
}

double sample_diameter(const std::vector<SurfaceSample>& samples) {
  double d2 = 0.0;
  for (std::size_t a = 0; a < samples.size(); ++a)
    for (std::size_t b = a + 1; b < samples.size(); ++b)
      d2 = std::max(d2, (samples[a].point - samples[b].point).squaredNorm());
  return std::sqrt(d2);
}

ScaleLattice make_lattice(const std::vector<SurfaceSample>& samples, const Vec3& centroid,
                          double h, double diameter, int level) {
  if (level < 1) throw ConfigError("lattice level must be >= 1");
  if (!(diameter > 0.0)) throw ConfigError("degenerate diameter");
  ScaleLattice L;
  L.centers.push_back(centroid);
  for (const auto& s : samples) L.centers.push_back(s.point);
  const double ratio = std::pow(2.0, 1.0 / (2.0 * level));
  for (int k = 0;; ++k) {
    const double r = 2.0 * h * std::pow(ratio, k);
    if (r > 2.0 * diameter * (1.0 + 1e-12)) break;
    L.radii.push_back(r);
  }
  return L;
}

AreaRatioResult area_ratio_sup(const BandQuadrature& q, const ScaleLattice& lattice,
                               double area, double diameter, double K) {
  if (!(area > 0.0) || !(diameter > 0.0) || !(K > 0.0)) {
    throw ConfigError("area ratio needs positive area, diameter and K");
  }
  AreaRatioResult res;
  std::vector<std::pair<double, double>> dw(q.points.size());
  for (const Vec3& p : lattice.centers) {
    for (std::size_t j = 0; j < q.points.size(); ++j) {
      dw[j] = {(q.points[j] - p).norm(), q.weights[j]};
    }
    std::sort(dw.begin(), dw.end());
    std::size_t j = 0;
    double acc = 0.0;
    for (double r : lattice.radii) {
      while (j < dw.size() && dw[j].first < r) acc += dw[j++].second;
      res.sup = std::max(res.sup, acc / std::pow(r, kDim - 1));
    }
  }
  res.bound = std::pow(2.0, kDim - 1) * std::exp(K * (diameter + 1.0)) * area;
  res.within_bound = res.sup <= res.bound;
  return res;
}

double gaussian_area(const BandQuadrature& q, const Vec3& p, double r) {
  const double norm = std::pow(4.0 * std::numbers::pi, -(kDim - 1) / 2.0);
  const double s = 1.0 / (4.0 * r * r);
  double acc = 0.0;
  for (std::size_t j = 0; j < q.points.size(); ++j) {
    acc += q.weights[j] * std::exp(-(q.points[j] - p).squaredNorm() * s);
  }
  return norm * acc / std::pow(r, kDim - 1);
}

EntropyResult entropy(const BandQuadrature& q, const ScaleLattice& lattice, bool refine) {
  EntropyResult best;
  const double norm = std::pow(4.0 * std::numbers::pi, -(kDim - 1) / 2.0);
  std::vector<double> d2(q.points.size());
  for (const Vec3& p : lattice.centers) {
    for (std::size_t j = 0; j < q.points.size(); ++j) d2[j] = (q.points[j] - p).squaredNorm();
    for (double r : lattice.radii) {
      const double s = 1.0 / (4.0 * r * r);
      double acc = 0.0;
      for (std::size_t j = 0; j < d2.size(); ++j) acc += q.weights[j] * std::exp(-d2[j] * s);
      const double F = norm * acc / std::pow(r, kDim - 1);
      if (F > best.value) best = {F, p, r};
    }
  }
  if (refine && best.radius > 0.0) {
    double a = best.radius / std::sqrt(2.0), b = best.radius * std::sqrt(2.0);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = gaussian_area(q, best.center, c), fd = gaussian_area(q, best.center, d);
    for (int it = 0; it < 40; ++it) {
      if (fc > fd) {
        b = d, d = c, fd = fc;
        c = b - gr * (b - a);
        fc = gaussian_area(q, best.center, c);
      } else {
        a = c, c = d, fc = fd;
        d = a + gr * (b - a);
        fd = gaussian_area(q, best.center, d);
      }
    }
    const double r = 0.5 * (a + b);
    const double F = gaussian_area(q, best.center, r);
    if (F > best.value) best = {F, best.center, r};
  }
  return best;
}

ScaleLattice field_lattice(const ScalarField& f, int samples, int level, double* diameter) {
  // Ray samples miss disconnected or non-star-shaped pieces; strided
  // interface nodes cover every piece.
  std::vector<SurfaceSample> s;
  try {
    s = surface_samples(f, samples);
  } catch (const NumericalError&) {
  }
  const auto all = interface_samples(f);
  const std::size_t stride = std::max<std::size_t>(1, all.size() / std::max(samples, 1));
  for (std::size_t i = 0; i < all.size(); i += stride) s.push_back(all[i]);
  if (s.empty()) throw NumericalError("field has no zero set to sample");
  const double diam = sample_diameter(s);
  if (diameter) *diameter = diam;
  auto L = make_lattice(s, interior_centroid(f), f.grid.h(), diam, level);
  // Centroid of each interior piece.
  Mask inside(f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) inside.on[i] = f[i] < 0.0;
  const auto pieces = connected_components(inside, 6);
  if (pieces.size() > 1) {
    for (const auto& piece : pieces) {
      Vec3 c = Vec3::Zero();
      for (std::size_t idx : piece) c += f.grid.position(idx);
      L.centers.push_back(c / static_cast<double>(piece.size()));
    }
  }
  // Focal centers p + nu * 2/H, one per 2h cell; these sit near the centers
  // of roundish parts.
  std::set<std::array<long, 3>> cells;
  const double cell = 2.0 * f.grid.h();
  for (const auto& smp : s) {
    if (!(smp.H > 0.0)) continue;
    const Vec3 c = smp.point + smp.normal * (2.0 / smp.H);
    if (!f.grid.contains(c)) continue;
    const std::array<long, 3> key{std::lround(c.x() / cell), std::lround(c.y() / cell),
                                  std::lround(c.z() / cell)};
    if (cells.insert(key).second) L.centers.push_back(c);
  }
  return L;
}

EntropyResult field_entropy(const ScalarField& f, int samples, int level, bool refine) {
  const auto L = field_lattice(f, samples, level);
  return entropy(band_quadrature(f), L, refine);
}

double shell_entropy_constant(int n) {
  double s = std::pow(2.0, n - 1);
  for (int k = 1; k < 12; ++k) {
    s += std::exp(-std::pow(4.0, k - 1)) * std::pow(2.0, (k + 1) * (n - 1));
  }
  return std::pow(4.0 * std::numbers::pi, -(n - 1) / 2.0) * s;
}

namespace {

// Most negative value of sign*f over nodes within `radius` of c (NaN-free,
// +inf if no node qualifies).
double ball_probe(const ScalarField& f, const Vec3& c, double radius, double sign) {
  const auto& g = f.grid;
  double worst = std::numeric_limits<double>::infinity();
  if (radius <= 0.0) return worst;
  const double h = g.h();
  const Vec3 lo = (c - g.origin()) / h - Vec3::Constant(radius / h);
  const Vec3 hi = (c - g.origin()) / h + Vec3::Constant(radius / h);
  const int i0 = std::max(0, static_cast<int>(std::ceil(lo[0])));
  const int j0 = std::max(0, static_cast<int>(std::ceil(lo[1])));
  const int k0 = std::max(0, static_cast<int>(std::ceil(lo[2])));
  const int i1 = std::min(g.nx() - 1, static_cast<int>(std::floor(hi[0])));
  const int j1 = std::min(g.ny() - 1, static_cast<int>(std::floor(hi[1])));
  const int k1 = std::min(g.nz() - 1, static_cast<int>(std::floor(hi[2])));
  const double r2 = radius * radius;
  for (int k = k0; k <= k1; ++k)
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        if ((g.position(i, j, k) - c).squaredNorm() >= r2) continue;
        worst = std::min(worst, sign * f.at(i, j, k));
      }
  return worst;
}

}  // namespace

NoncollapsingResult noncollapsing_test(const std::vector<SurfaceSample>& samples,
                                       const ScalarField& f, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
  NoncollapsingResult res;
  const double shrink = 1.5 * f.grid.h();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& smp = samples[s];
    if (!(smp.H > 0.0)) throw PreconditionError("ball test needs samples with H > 0");
    const double r = alpha / smp.H;
    const double in = ball_probe(f, smp.point + r * smp.normal, r - shrink, -1.0);
    const double out = ball_probe(f, smp.point - r * smp.normal, r - shrink, 1.0);
    const double m = std::min(in, out);
    if (!(m > 0.0)) {
      res.pass = false;
      if (res.worst_sample < 0 || m < res.worst_margin) {
        res.worst_margin = m;
        res.worst_sample = static_cast<int>(s);
      }
    }
  }
  return res;
}

double alpha_observed(const std::vector<SurfaceSample>& samples, const ScalarField& f,
                      double tol) {
  double lo = 0.0, hi = 1.0;
  while (noncollapsing_test(samples, f, hi).pass) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) return lo;
  }
  while (hi - lo > tol) {
    const double m = 0.5 * (lo + hi);
    (noncollapsing_test(samples, f, m).pass ? lo : hi) = m;
  }
  return lo;
}

namespace {

double plane_trace(const Mat3& A, const Mat3& G, const Vec3& normal) {
  const auto t = tangent_frame(normal);
  Eigen::Matrix<double, 3, 2> V;
  V.col(0) = t[0];
  V.col(1) = t[1];
  const Eigen::Matrix2d G2 = V.transpose() * G * V;
  const Eigen::Matrix2d A2 = V.transpose() * A * V;
  return (G2.inverse() * A2).trace();
}

}  // namespace

double min_trace_over_2planes(const Mat3& A, const Mat3& G) {
  constexpr int kNet = 2000;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<std::pair<double, Vec3>> net;
  net.reserve(kNet + 3);
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = 1.0;
    net.emplace_back(plane_trace(A, G, e), e);
  }
  for (int i = 0; i < kNet; ++i) {
    const double z = 1.0 - (i + 0.5) / kNet;  // upper hemisphere; planes are unoriented
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 nu(r * std::cos(golden * i), r * std::sin(golden * i), z);
    net.emplace_back(plane_trace(A, G, nu), nu);
  }
  std::partial_sort(net.begin(), net.begin() + 4, net.end(),
                    [](const auto& x, const auto& y) { return x.first < y.first; });
  double best = net.front().first;
  for (int s = 0; s < 4; ++s) {
    Vec3 nu = net[s].second;
    double val = net[s].first;
    for (double step = 0.05; step > 1e-10; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        const auto t = tangent_frame(nu);
        for (const Vec3& d : {t[0], Vec3(-t[0]), t[1], Vec3(-t[1])}) {
          const Vec3 cand = (nu + step * d).normalized();
          const double cv = plane_trace(A, G, cand);
          if (cv < val) {
            val = cv;
            nu = cand;
            improved = true;
            break;
          }
        }
      }
    }
    best = std::min(best, val);
  }
  return best;
}

TwoConvexity two_convexity_min(const std::vector<SurfaceSample>& samples) {
  TwoConvexity res;
  res.min_k1k2 = res.beta_hat = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double direct = s.k1 + s.k2;
    const Mat3 S = projected_shape_operator(s.jet);
    const auto t = tangent_frame(s.normal);
    double via_trace = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 64; ++k) {
      const double th = std::numbers::pi * k / 64.0;
      const Vec3 v1 = std::cos(th) * t[0] + std::sin(th) * t[1];
      const Vec3 v2 = 0.3 * v1 + 0.5 * (-std::sin(th) * t[0] + std::cos(th) * t[1]);
      Eigen::Matrix<double, 3, 2> V;
      V.col(0) = v1;
      V.col(1) = v2;
      const Eigen::Matrix2d G = V.transpose() * V;
      const Eigen::Matrix2d A = V.transpose() * S * V;
      via_trace = std::min(via_trace, (G.inverse() * A).trace());
    }
    res.max_disagreement = std::max(res.max_disagreement, std::abs(via_trace - direct));
    res.min_k1k2 = std::min(res.min_k1k2, direct);
    res.beta_hat = std::min(res.beta_hat, direct / s.H);
  }
  if (res.max_disagreement > 1e-6) {
    throw NumericalError("sorted curvatures and min-trace formula disagree");
  }
  return res;
}

MetricsReport compute_metrics(const ScalarField& f, int samples) {
  const auto s = surface_samples(f, samples);
  // Curvature extremes also look at every interface node; rays miss junctions.
  auto dense = interface_samples(f);
  dense.insert(dense.end(), s.begin(), s.end());
  const auto cv = convexity_check(dense);
  const auto tc = two_convexity_min(dense);
  const auto q = band_quadrature(f);
  MetricsReport m;
  m.min_H = cv.min_H;
  m.max_H = cv.max_H;
  m.min_k1k2 = tc.min_k1k2;
  m.beta_hat = tc.beta_hat;
  m.area = q.area();
  const auto L = field_lattice(f, samples, 1, &m.diameter);
  const auto ar = area_ratio_sup(q, L, m.area, m.diameter, std::max(m.max_H, 1e-12));
  m.max_area_ratio = ar.sup;
  m.area_ratio_within_bound = ar.within_bound;
  m.entropy = entropy(q, L).value;
  m.entropy_within_shell_bound = m.entropy <= shell_entropy_constant(kDim) * m.max_area_ratio;
  m.alpha_observed = cv.min_H > 0.0 ? alpha_observed(s, f) : 0.0;
  return m;
}

}  // namespace lsflab
