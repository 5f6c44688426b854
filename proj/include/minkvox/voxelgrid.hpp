#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace minkvox {

using Vec3 = Eigen::Vector3d;
using Offset3 = std::array<std::ptrdiff_t, 3>;

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t operator[](int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
  std::size_t count() const { return nx * ny * nz; }
  bool operator==(const Dims&) const = default;
};

/// Periodic regular grid of voxels with edge length `spacing`.
///
/// Values are linearized x fastest, z slowest: i = x + nx * (y + ny * z).
/// Voxel (x, y, z) is centered at ((x + 1/2) h, (y + 1/2) h, (z + 1/2) h).
class Geometry {
 public:
  Geometry(Dims dims, double spacing);

  const Dims& dims() const { return dims_; }
  double spacing() const { return spacing_; }
  std::size_t count() const { return dims_.count(); }
  double voxel_volume() const { return spacing_ * spacing_ * spacing_; }
  Vec3 extent() const;

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims_.nx * (y + dims_.ny * z);
  }
  std::size_t wrapped_index(std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) const;
  std::array<std::size_t, 3> coords(std::size_t linear) const;
  Vec3 center(std::size_t x, std::size_t y, std::size_t z) const;

  bool operator==(const Geometry&) const = default;

 private:
  Dims dims_;
  double spacing_;
};

/// Gray-value depth: either a finite depth p >= 1 or continuous values.
class Depth {
 public:
  static Depth continuous() { return Depth(0); }
  static Depth levels(int p);

  bool is_continuous() const { return p_ == 0; }
  int p() const { return p_; }
  std::string to_string() const;

  bool operator==(const Depth&) const = default;

 private:
  explicit Depth(int p) : p_(p) {}
  int p_;
};

/// Number of nonzero colors of the depth-p palette {0, 1/L, ..., 1}:
/// L = 1 for p = 1, L = p^3 - 1 otherwise.
long color_levels(int p);

/// True if `value` is admissible for a depth-p grid: a member of the color
/// palette or a sub-voxel fraction m / p^3 as produced by `voxelize`.
bool is_depth_value(double value, int p);

/// Gray-value image with values in [0, 1]. Immutable after construction.
class VoxelGrid {
 public:
  VoxelGrid(Geometry geometry, std::vector<double> values, Depth depth = Depth::continuous());

  static VoxelGrid filled(Geometry geometry, double value, Depth depth = Depth::continuous());

  const Geometry& geometry() const { return geometry_; }
  const Dims& dims() const { return geometry_.dims(); }
  double spacing() const { return geometry_.spacing(); }
  const Depth& depth() const { return depth_; }
  std::size_t count() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  double operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return values_[geometry_.index(x, y, z)];
  }
  double mean() const;

 private:
  Geometry geometry_;
  std::vector<double> values_;
  Depth depth_;
};

/// Unconstrained scalar field on a grid (kernels, tensor components).
struct ScalarField {
  Geometry geometry;
  std::vector<double> values;
};

// ---------------------------------------------------------------------------
// Analytic shapes

struct Ball {
  Vec3 center;
  double radius;
};

struct Cylinder {
  Vec3 center;
  Vec3 axis;  // unit vector
  double length;
  double diameter;
};

/// Slabs [lo, hi] (length units) along one coordinate axis, unbounded in the others.
struct Laminate {
  int axis;
  std::vector<std::array<double, 2>> slabs;
};

struct Shape;

struct Union {
  std::vector<Shape> members;
};

struct Shape {
  std::variant<Ball, Cylinder, Laminate, Union> kind;
};

struct Box {
  Vec3 lo;
  Vec3 hi;
};

/// Throws InvalidArgument if a parameter is out of range.
void validate(const Shape& shape);
/// Points on the boundary count as inside.
bool contains(const Shape& shape, const Vec3& point);
/// Axis-aligned bounding box; for laminates the box is unbounded transversally.
Box bounding_box(const Shape& shape);

// ---------------------------------------------------------------------------
// Operations

/// Sub-voxel voxelization: each voxel gets the fraction of its p^3 sub-cell
/// centers lying inside `shape` (p = 1: center rule). Shapes are not wrapped
/// across the periodic boundary, so they must lie inside the box (or contain
/// all of it).
VoxelGrid voxelize(const Shape& shape, Dims dims, double spacing, int p);

/// Rounds every value to the nearest color of the depth-p palette; ties go up.
VoxelGrid quantize(const VoxelGrid& grid, int p);

/// Periodic circular shift: the value at index i moves to i + offset (mod dims).
VoxelGrid shift(const VoxelGrid& grid, const Offset3& offset);

// ---------------------------------------------------------------------------
// Deterministic fiber placement for synthetic test structures

/// rows x cols parallel cylinders along coordinate `axis`, centered in a
/// regular transverse lattice that fills the box. Each fiber is centered
/// along the axis.
std::vector<Cylinder> parallel_fiber_array(const Geometry& geometry, int axis, double length,
                                           double diameter, std::size_t rows, std::size_t cols);

/// One cubic cell per fiber, fiber centered in its cell; cells are large
/// enough that fibers of any orientation cannot touch. Returns the fibers and
/// the voxel count per cell edge.
struct CellPlacement {
  std::vector<Cylinder> fibers;
  std::size_t cell_voxels;
  Dims dims;
};
CellPlacement cell_fiber_placement(const std::vector<Vec3>& axes, double length, double diameter,
                                   double spacing, double gap);

Shape make_union(const std::vector<Cylinder>& fibers);

}  // namespace minkvox
