#include "lsflab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lsflab {

UniformGrid::UniformGrid(std::array<int, 3> dims, Vec3 origin, double h)
    : dims_(dims), origin_(origin), h_(h) {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 5) {
      throw ConfigError("grid needs at least 5 nodes per axis, got " +
                        std::to_string(dims[a]));
    }
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid spacing must be positive");
  if (!origin.allFinite()) throw ConfigError("grid origin must be finite");
}

UniformGrid UniformGrid::covering(const Vec3& lo, const Vec3& hi, double h) {
  if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");
  std::array<int, 3> d{};
  Vec3 o;
  for (int a = 0; a < 3; ++a) {
    if (!(hi[a] > lo[a])) throw ConfigError("empty bounding box");
    const double mid = 0.5 * (lo[a] + hi[a]);
    const int half = static_cast<int>(std::ceil(0.5 * (hi[a] - lo[a]) / h - 1e-9));
    d[a] = std::max(2 * half + 1, 5);
    o[a] = mid - h * static_cast<double>((d[a] - 1) / 2);
  }
  return UniformGrid(d, o, h);
}

Node UniformGrid::node(std::size_t idx) const {
  const auto nx = static_cast<std::size_t>(dims_[0]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  Node n;
  n.i = static_cast<int>(idx % nx);
  idx /= nx;
  n.j = static_cast<int>(idx % ny);
  n.k = static_cast<int>(idx / ny);
  return n;
}

Vec3 UniformGrid::upper() const {
  return origin_ + h_ * Vec3(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1);
}

bool UniformGrid::contains(const Vec3& p, double tol) const {
  const Vec3 hi = upper();
  for (int a = 0; a < 3; ++a) {
    if (p[a] < origin_[a] - tol || p[a] > hi[a] + tol) return false;
  }
  return true;
}

int UniformGrid::boundary_distance(const Node& n) const {
  return std::min({n.i, n.j, n.k, dims_[0] - 1 - n.i, dims_[1] - 1 - n.j,
                   dims_[2] - 1 - n.k});
}

Node UniformGrid::nearest(const Vec3& p) const {
  const Vec3 q = (p - origin_) / h_;
  Node n;
  n.i = std::clamp(static_cast<int>(std::lround(q[0])), 0, dims_[0] - 1);
  n.j = std::clamp(static_cast<int>(std::lround(q[1])), 0, dims_[1] - 1);
  n.k = std::clamp(static_cast<int>(std::lround(q[2])), 0, dims_[2] - 1);
  return n;
}

ScalarField::ScalarField(const UniformGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw ConfigError("field length does not match grid node count");
  }
}

void ScalarField::check_finite() const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericalError("non-finite field value at node " + std::to_string(i));
    }
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(on.begin(), on.end(), std::uint8_t{1}));
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "LSF1 I/O assumes a little-endian host");

constexpr char kMagic[8] = {'L', 'S', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("truncated LSF1 file");
  return v;
}

}  // namespace

void write_lsf1(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 8);
  for (int a = 0; a < 3; ++a) put<std::uint64_t>(os, field.grid.dims()[a]);
  for (int a = 0; a < 3; ++a) put<double>(os, field.grid.origin()[a]);
  put<double>(os, field.grid.h());
  os.write(reinterpret_cast<const char*>(field.values.data()),
           static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!os) throw ConfigError("write failed: " + path.string());
}

ScalarField read_lsf1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) {
    throw ConfigError("not an LSF1 file: " + path.string());
  }
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    const auto d = get<std::uint64_t>(is);
    if (d > (1u << 20)) throw ConfigError("LSF1 dims out of range");
    dims[a] = static_cast<int>(d);
  }
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = get<double>(is);
  const double h = get<double>(is);
  UniformGrid g(dims, origin, h);
  std::vector<double> v(g.size());
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw ConfigError("truncated LSF1 payload");
  ScalarField f(g, std::move(v));
  f.check_finite();
  return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid == b.grid)) throw ConfigError("grid mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

}  // namespace lsflab
