#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lsflab/error.hpp"

namespace lsflab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Integer node coordinates.
struct Node {
  int i = 0;
  int j = 0;
  int k = 0;
  friend bool operator==(const Node&, const Node&) = default;
};

/// Isotropic uniform grid. Node (i,j,k) sits at origin + h*(i,j,k).
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(std::array<int, 3> dims, Vec3 origin, double h);

  /// Smallest grid with spacing h covering [lo, hi] (componentwise).
  static UniformGrid covering(const Vec3& lo, const Vec3& hi, double h);

  const std::array<int, 3>& dims() const { return dims_; }
  int nx() const { return dims_[0]; }
  int ny() const { return dims_[1]; }
  int nz() const { return dims_[2]; }
  const Vec3& origin() const { return origin_; }
  double h() const { return h_; }
  std::size_t size() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * k);
  }
  std::size_t index(const Node& n) const { return index(n.i, n.j, n.k); }
  Node node(std::size_t idx) const;

  Vec3 position(int i, int j, int k) const {
    return origin_ + h_ * Vec3(i, j, k);
  }
  Vec3 position(const Node& n) const { return position(n.i, n.j, n.k); }
  Vec3 position(std::size_t idx) const { return position(node(idx)); }

  Vec3 upper() const;
  bool contains(const Vec3& p, double tol = 0.0) const;
  bool contains(const Node& n) const {
    return n.i >= 0 && n.j >= 0 && n.k >= 0 && n.i < dims_[0] && n.j < dims_[1] &&
           n.k < dims_[2];
  }
  /// Distance (in nodes) from n to the nearest boundary face.
  int boundary_distance(const Node& n) const;
  /// Node nearest to a physical point, clamped into the grid.
  Node nearest(const Vec3& p) const;

  friend bool operator==(const UniformGrid& a, const UniformGrid& b) {
    return a.dims_ == b.dims_ && a.origin_ == b.origin_ && a.h_ == b.h_;
  }

 private:
  std::array<int, 3> dims_{5, 5, 5};
  Vec3 origin_ = Vec3::Zero();
  double h_ = 1.0;
};

/// Values on a grid, x-fastest.
struct ScalarField {
  UniformGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const UniformGrid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}
  ScalarField(const UniformGrid& g, std::vector<double> v);

  double operator[](std::size_t idx) const { return values[idx]; }
  double& operator[](std::size_t idx) { return values[idx]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
  double at(const Node& n) const { return values[grid.index(n)]; }

  /// Throws NumericalError on the first non-finite value.
  void check_finite() const;
};

/// Boolean node mask on a grid.
struct Mask {
  UniformGrid grid;
  std::vector<std::uint8_t> on;

  Mask() = default;
  explicit Mask(const UniformGrid& g) : grid(g), on(g.size(), 0) {}
  std::size_t count() const;
};

/// LSF1 binary format: "LSFIELD1", 3x u64 dims, 3x f64 origin, f64 h, then
/// the values, all little-endian, x-fastest.
void write_lsf1(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_lsf1(const std::filesystem::path& path);

/// Max |a - b| over nodes; grids must match.
double max_abs_diff(const ScalarField& a, const ScalarField& b);

}  // namespace lsflab
