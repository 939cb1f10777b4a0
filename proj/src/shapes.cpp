#include "lsflab/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "lsflab/redistance.hpp"

namespace lsflab {

namespace {

const std::map<ShapeKind, std::vector<std::string>>& required_params() {
  static const std::map<ShapeKind, std::vector<std::string>> req = {
      {ShapeKind::sphere, {"radius"}},
      {ShapeKind::ellipsoid, {"a", "b", "c"}},
      {ShapeKind::dumbbell, {"neck_radius", "bulb_radius", "bulb_separation"}},
      {ShapeKind::bumpy_dumbbell,
       {"neck_radius", "bulb_radius", "large_bulb_radius", "bulb_separation"}},
      {ShapeKind::capsule, {"radius", "half_length"}},
  };
  return req;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Log-sum-exp soft maximum with width k.
double soft_max(std::initializer_list<double> v, double k) {
  const double m = std::max(v);
  double s = 0.0;
  for (double x : v) s += std::exp((x - m) / k);
  return m + k * std::log(s);
}

struct Revolution {
  double a = 0.0;  // neck amplitude, solved so that P(0) = neck_radius^2
  double b = 0.0;  // neck width
  double c = 0.0;  // half separation
  double r_top = 0.0;
  double r_bottom = 0.0;
  double k = 0.0;
  bool arm = false;  // straight arm of radius a instead of the waisted neck
  double k_small = 0.0;

  double P(double z) const {
    const double top = r_top * r_top - (z - c) * (z - c);
    const double bottom = r_bottom * r_bottom - (z + c) * (z + c);
    if (arm) {
      const double over = std::max(0.0, std::abs(z) - c);
      const double pa = a * a - over * over;
      return soft_max({soft_max({pa, bottom}, k_small), top}, k);
    }
    const double pn = a * a * (1.0 + (z / b) * (z / b)) * (1.0 - (z / c) * (z / c));
    return soft_max({pn, top, bottom}, k);
  }
  double dP(double z) const {
    const double e = 1e-6;
    return (P(z + e) - P(z - e)) / (2 * e);
  }
  double pole() const {
    const double zmax = c + std::max(r_top, r_bottom);
    double lo = 0.0, hi = zmax + 1.0;
    for (double z = hi; z > 0.0; z -= 1e-3) {
      if (P(z) > 0.0) {
        lo = z;
        hi = z + 1e-3;
        break;
      }
    }
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (lo + hi);
      (P(m) > 0.0 ? lo : hi) = m;
    }
    return hi;
  }
  double bottom_pole() const {
    Revolution f = *this;
    std::swap(f.r_top, f.r_bottom);
    return f.pole();
  }
};

Revolution make_revolution(const ShapeSpec& s) {
  Revolution r;
  const double nu = s.param("neck_radius");
  r.c = 0.5 * s.param("bulb_separation");
  r.b = 0.2 * s.param("bulb_separation");
  if (s.kind == ShapeKind::bumpy_dumbbell) {
    r.arm = true;
    r.a = nu;
    r.r_top = s.param("large_bulb_radius");
    r.r_bottom = s.param("bulb_radius");
    // Blend widths keep the profile curvature at both junctions bounded.
    // P' jumps by 2*sqrt(R^2 - a^2) at a junction; width s^2/6 caps P'' below 2.
    r.k = std::max(2.0 * (r.r_top * r.r_top - nu * nu) / 3.0, 0.05 * nu * nu);
    r.k_small = std::max(2.0 * (r.r_bottom * r.r_bottom - nu * nu) / 3.0, 0.05 * nu * nu);
    return r;
  }
  r.r_top = r.r_bottom = s.param("bulb_radius");
  auto p0 = [&](double a) {
    Revolution t = r;
    t.a = a;
    t.k = 4.0 * a * a;
    return t.P(0.0);
  };
  double lo = 0.5 * nu, hi = nu;
  if (p0(lo) > nu * nu) {
    throw ConfigError("bulbs too close: the neck radius cannot be realized");
  }
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (lo + hi);
    (p0(m) < nu * nu ? lo : hi) = m;
  }
  r.a = 0.5 * (lo + hi);
  r.k = 4.0 * r.a * r.a;
  return r;
}

}  // namespace

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::ellipsoid: return "ellipsoid";
    case ShapeKind::dumbbell: return "dumbbell";
    case ShapeKind::bumpy_dumbbell: return "bumpy_dumbbell";
    case ShapeKind::capsule: return "capsule";
  }
  return "?";
}

ShapeKind shape_kind_from_string(const std::string& s) {
  for (auto k : {ShapeKind::sphere, ShapeKind::ellipsoid, ShapeKind::dumbbell,
                 ShapeKind::bumpy_dumbbell, ShapeKind::capsule}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown shape kind '" + s + "'");
}

std::string to_string(PerturbationMode m) {
  return m == PerturbationMode::normal_bump ? "normal_bump" : "low_frequency_wobble";
}

PerturbationMode perturbation_mode_from_string(const std::string& s) {
  if (s == "normal_bump") return PerturbationMode::normal_bump;
  if (s == "low_frequency_wobble" || s == "wobble") return PerturbationMode::low_frequency_wobble;
  throw ConfigError("unknown perturbation mode '" + s + "'");
}

double ShapeSpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing shape parameter '" + key + "'");
  return it->second;
}

void ShapeSpec::validate() const {
  const auto& req = required_params().at(kind);
  for (const auto& key : req) {
    const double v = param(key);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("shape parameter '" + key + "' must be a positive length");
    }
  }
  for (const auto& [key, v] : params) {
    if (std::find(req.begin(), req.end(), key) == req.end()) {
      throw ConfigError("parameter '" + key + "' does not apply to " + to_string(kind));
    }
  }
  if (kind == ShapeKind::dumbbell || kind == ShapeKind::bumpy_dumbbell) {
    if (!(param("neck_radius") < param("bulb_radius"))) {
      throw ConfigError("neck_radius must be smaller than bulb_radius");
    }
    if (kind == ShapeKind::bumpy_dumbbell &&
        !(param("bulb_radius") < param("large_bulb_radius"))) {
      throw ConfigError("bulb_radius must be smaller than large_bulb_radius");
    }
    const double big = kind == ShapeKind::dumbbell ? param("bulb_radius")
                                                   : param("large_bulb_radius");
    if (!(0.5 * param("bulb_separation") > big)) {
      throw ConfigError("bulb_separation must exceed twice the bulb radius");
    }
    make_revolution(*this);
  }
}

std::pair<Vec3, Vec3> ShapeSpec::bounds() const {
  validate();
  switch (kind) {
    case ShapeKind::sphere: {
      const double r = param("radius");
      return {Vec3::Constant(-r), Vec3::Constant(r)};
    }
    case ShapeKind::ellipsoid: {
      const Vec3 e(param("a"), param("b"), param("c"));
      return {-e, e};
    }
    case ShapeKind::capsule: {
      const double r = param("radius"), l = param("half_length");
      return {Vec3(-r, -r, -l - r), Vec3(r, r, l + r)};
    }
    case ShapeKind::dumbbell:
    case ShapeKind::bumpy_dumbbell: {
      const Revolution rv = make_revolution(*this);
      const double zt = rv.pole(), zb = rv.bottom_pole();
      double rmax = 0.0;
      for (double z = -zb; z <= zt; z += 1e-3) rmax = std::max(rmax, rv.P(z));
      rmax = std::sqrt(rmax) + 1e-3;
      return {Vec3(-rmax, -rmax, -zb), Vec3(rmax, rmax, zt)};
    }
  }
  throw ConfigError("bad shape kind");
}

double revolution_profile(const ShapeSpec& spec, double z) {
  if (spec.kind != ShapeKind::dumbbell && spec.kind != ShapeKind::bumpy_dumbbell) {
    throw ConfigError("revolution_profile needs a dumbbell shape");
  }
  return make_revolution(spec).P(z);
}

ShapeSpec preset(const std::string& name) {
  ShapeSpec s;
  if (name == "sphere") {
    s.kind = ShapeKind::sphere;
    s.params = {{"radius", 1.0}};
  } else if (name == "ellipsoid") {
    s.kind = ShapeKind::ellipsoid;
    s.params = {{"a", 1.0}, {"b", 0.8}, {"c", 0.6}};
  } else if (name == "dumbbell") {
    s.kind = ShapeKind::dumbbell;
    s.params = {{"neck_radius", 0.15}, {"bulb_radius", 0.45}, {"bulb_separation", 2.0}};
  } else if (name == "bumpy_dumbbell") {
    s.kind = ShapeKind::bumpy_dumbbell;
    s.params = {{"neck_radius", 0.15},
                {"bulb_radius", 0.16},
                {"large_bulb_radius", 0.5},
                {"bulb_separation", 2.0}};
  } else if (name == "capsule") {
    s.kind = ShapeKind::capsule;
    s.params = {{"radius", 0.3}, {"half_length", 1.2}};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return s;
}

std::vector<std::string> preset_names() {
  return {"sphere", "ellipsoid", "dumbbell", "bumpy_dumbbell", "capsule"};
}

ShapeSpec parse_shape_config(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  ShapeSpec s;
  bool have_kind = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "kind") {
      s.kind = shape_kind_from_string(val);
      have_kind = true;
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad number '" + val + "'");
    }
    s.params[key] = v;
  }
  if (!have_kind) throw ConfigError("shape config lacks 'kind'");
  s.validate();
  return s;
}

std::string format_shape_config(const ShapeSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << "kind = " << to_string(spec.kind) << "\n";
  for (const auto& [k, v] : spec.params) os << k << " = " << v << "\n";
  return os.str();
}

UniformGrid default_grid(const ShapeSpec& spec, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h must be positive");
  const auto [lo, hi] = spec.bounds();
  const Vec3 m = Vec3::Constant(8.0 * h);
  return UniformGrid::covering(lo - m, hi + m, h);
}

ScalarField generate_sdf(const ShapeSpec& spec, const UniformGrid& grid) {
  spec.validate();
  const auto [lo, hi] = spec.bounds();
  const double margin = 4.0 * grid.h();
  for (int a = 0; a < 3; ++a) {
    if (lo[a] - margin < grid.origin()[a] || hi[a] + margin > grid.upper()[a]) {
      throw ConfigError("shape does not fit the grid with a 4h margin");
    }
  }
  ScalarField f(grid);
  const std::size_t n = grid.size();
  switch (spec.kind) {
    case ShapeKind::sphere: {
      const double r = spec.param("radius");
      for (std::size_t i = 0; i < n; ++i) f[i] = grid.position(i).norm() - r;
      break;
    }
    case ShapeKind::ellipsoid: {
      const Vec3 e(spec.param("a"), spec.param("b"), spec.param("c"));
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 x = grid.position(i);
        const double k0 = x.cwiseQuotient(e).norm();
        const double k1 = x.cwiseQuotient(e.cwiseProduct(e)).norm();
        f[i] = k1 > 1e-300 ? k0 * (k0 - 1.0) / k1 : -e.minCoeff();
      }
      break;
    }
    case ShapeKind::capsule: {
      const double r = spec.param("radius"), l = spec.param("half_length");
      for (std::size_t i = 0; i < n; ++i) {
        Vec3 x = grid.position(i);
        x[2] -= std::clamp(x[2], -l, l);
        f[i] = x.norm() - r;
      }
      break;
    }
    case ShapeKind::dumbbell:
    case ShapeKind::bumpy_dumbbell: {
      const Revolution rv = make_revolution(spec);
      ScalarField g(grid);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 x = grid.position(i);
        const double rho2 = x[0] * x[0] + x[1] * x[1];
        const double p = rv.P(x[2]);
        const double dp = rv.dP(x[2]);
        const double gn = std::sqrt(4.0 * rho2 + dp * dp);
        g[i] = (rho2 - p) / std::max(gn, 1e-3);
      }
      f = redistance(g, 1e6);
      break;
    }
  }
  return f;
}

Vec3 interior_centroid(const ScalarField& field) {
  Vec3 acc = Vec3::Zero();
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field[i] < 0.0) {
      acc += field.grid.position(i);
      ++cnt;
    }
  }
  if (cnt == 0) throw ConfigError("field has no interior nodes");
  return acc / static_cast<double>(cnt);
}

namespace {

// First crossing f: - -> + along centroid + s d, bisected on the trilinear
// interpolant. Returns false if the ray leaves the usable box first.
bool ray_crossing(const ScalarField& f, const Vec3& c, const Vec3& d, Vec3& out) {
  const auto& g = f.grid;
  const double h = g.h();
  const Vec3 lo = g.origin() + Vec3::Constant(1.5 * h);
  const Vec3 hi = g.upper() - Vec3::Constant(1.5 * h);
  auto inside = [&](const Vec3& p) {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  };
  if (!inside(c) || trilinear_sample(f, c) >= 0.0) return false;
  double s0 = 0.0;
  const double step = 0.5 * h;
  for (;;) {
    const double s1 = s0 + step;
    const Vec3 p = c + s1 * d;
    if (!inside(p)) return false;
    if (trilinear_sample(f, p) >= 0.0) {
      double a = s0, b = s1;
      while (b - a > 1e-10 * h) {
        const double m = 0.5 * (a + b);
        (trilinear_sample(f, c + m * d) < 0.0 ? a : b) = m;
      }
      out = c + (0.5 * (a + b)) * d;
      return true;
    }
    s0 = s1;
  }
}

}  // namespace

std::vector<SurfaceSample> surface_samples(const ScalarField& field, int count) {
  if (count <= 0) throw ConfigError("sample count must be positive");
  const Vec3 c = interior_centroid(field);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double fence = gradient_fence(field.grid.h());
  std::vector<SurfaceSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    const Vec3 d(r * std::cos(phi), r * std::sin(phi), z);
    Vec3 p;
    if (!ray_crossing(field, c, d, p)) continue;
    Jet2 jet = jet2_interpolated(field, p);
    jet.value = -jet.value;
    jet.gradient = -jet.gradient;
    jet.hessian = -jet.hessian;
    try {
      const LevelSetGeometry geo = level_set_geometry(jet, fence);
      out.push_back({p, geo.normal, geo.k1, geo.k2, geo.H, jet});
    } catch (const DegenerateGradientError&) {
    }
  }
  if (2 * static_cast<int>(out.size()) < count) {
    throw NumericalError("surface sampling hit the zero set on fewer than half the rays");
  }
  return out;
}

std::vector<SurfaceSample> interface_samples(const ScalarField& field) {
  const auto& g = field.grid;
  const double fence = gradient_fence(g.h());
  std::vector<SurfaceSample> out;
  const Mask band = interface_nodes(field);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!band.on[idx]) continue;
    const Node n = g.node(idx);
    if (g.boundary_distance(n) < 3) continue;
    Vec3 p = g.position(n);
    // Two Newton projections onto the trilinear zero set.
    bool ok = true;
    for (int it = 0; it < 2 && ok; ++it) {
      const Jet2 j = jet2_interpolated(field, p);
      const double gn2 = j.gradient.squaredNorm();
      if (gn2 < fence * fence) {
        ok = false;
        break;
      }
      p -= (trilinear_sample(field, p) / gn2) * j.gradient;
      ok = g.contains(p, -2.0 * g.h());
    }
    if (!ok) continue;
    Jet2 jet = jet2_interpolated(field, p);
    jet.value = -jet.value;
    jet.gradient = -jet.gradient;
    jet.hessian = -jet.hessian;
    try {
      const LevelSetGeometry geo = level_set_geometry(jet, fence);
      out.push_back({p, geo.normal, geo.k1, geo.k2, geo.H, jet});
    } catch (const DegenerateGradientError&) {
    }
  }
  return out;
}

ConvexityCheck convexity_check(const std::vector<SurfaceSample>& samples) {
  ConvexityCheck c;
  c.min_H = c.min_k1k2 = std::numeric_limits<double>::infinity();
  c.max_H = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    c.min_H = std::min(c.min_H, s.H);
    c.max_H = std::max(c.max_H, s.H);
    c.min_k1k2 = std::min(c.min_k1k2, s.k1 + s.k2);
  }
  return c;
}

ScalarField perturbation_profile(const ShapeSpec& base, const PerturbationSpec& pert,
                                 const UniformGrid& grid) {
  ScalarField w(grid);
  const auto [lo, hi] = base.bounds();
  if (pert.mode == PerturbationMode::low_frequency_wobble) {
    const double L = 0.5 * (hi[2] - lo[2]);
    const double zc = 0.5 * (hi[2] + lo[2]);
    const double freq = pert.frequency * std::numbers::pi / L;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      w[i] = std::cos(freq * (grid.position(i)[2] - zc) + pert.phase);
    }
    return w;
  }
  // Gaussian bump centered where the ray from the origin at azimuth `phase`
  // meets the base surface.
  const Vec3 d(std::cos(pert.phase), std::sin(pert.phase), 0.0);
  const double reach = std::abs(d[0]) * hi[0] + std::abs(d[1]) * hi[1];
  const double sigma = 0.3 * std::min({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]}) * 0.5;
  const ScalarField f = generate_sdf(base, grid);
  Vec3 center = reach * d;
  double a = 0.0, b = reach + 2.0 * grid.h();
  if (trilinear_sample(f, Vec3::Zero()) < 0.0) {
    for (int it = 0; it < 80; ++it) {
      const double m = 0.5 * (a + b);
      (trilinear_sample(f, m * d) < 0.0 ? a : b) = m;
    }
    center = 0.5 * (a + b) * d;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r2 = (grid.position(i) - center).squaredNorm();
    w[i] = std::exp(-r2 / (2.0 * sigma * sigma));
  }
  return w;
}

ScalarField perturb_field(const ScalarField& base, const ShapeSpec& spec,
                          const PerturbationSpec& pert) {
  if (!(pert.amplitude >= 0.0) || !std::isfinite(pert.amplitude)) {
    throw ConfigError("perturbation amplitude must be >= 0");
  }
  if (pert.amplitude == 0.0) return base;
  const ScalarField w = perturbation_profile(spec, pert, base.grid);
  ScalarField f = base;
  for (std::size_t i = 0; i < f.values.size(); ++i) f[i] += pert.amplitude * w[i];
  const auto& g = f.grid;
  const Mask iface = interface_nodes(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!iface.on[i]) continue;
    const Node n = g.node(i);
    if (g.boundary_distance(n) < 1) {
      throw ConfigError("perturbed surface reaches the grid boundary");
    }
    if (central_gradient(f, n).norm() < 0.25) {
      throw ConfigError("perturbation amplitude too large: surface no longer embedded");
    }
  }
  return f;
}

ScalarField perturb_sdf(const ShapeSpec& base, const PerturbationSpec& pert,
                        const UniformGrid& grid) {
  return perturb_field(generate_sdf(base, grid), base, pert);
}

}  // namespace lsflab
