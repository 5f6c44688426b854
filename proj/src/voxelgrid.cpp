#include "minkvox/voxelgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "minkvox/error.hpp"
#include "minkvox/parallel.hpp"

namespace minkvox {

namespace {

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

}  // namespace

Geometry::Geometry(Dims dims, double spacing) : dims_(dims), spacing_(spacing) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0)
    throw InvalidArgument("grid dimensions must be positive");
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2)
    throw InvalidArgument(
        fmt::format("grid dimensions must be at least 2, got {}x{}x{}", dims.nx, dims.ny, dims.nz));
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw InvalidArgument(fmt::format("voxel spacing must be positive, got {}", spacing));
}

Vec3 Geometry::extent() const {
  return {static_cast<double>(dims_.nx) * spacing_, static_cast<double>(dims_.ny) * spacing_,
          static_cast<double>(dims_.nz) * spacing_};
}

std::size_t Geometry::wrapped_index(std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) const {
  return index(wrap(x, dims_.nx), wrap(y, dims_.ny), wrap(z, dims_.nz));
}

std::array<std::size_t, 3> Geometry::coords(std::size_t linear) const {
  const std::size_t x = linear % dims_.nx;
  const std::size_t rest = linear / dims_.nx;
  return {x, rest % dims_.ny, rest / dims_.ny};
}

Vec3 Geometry::center(std::size_t x, std::size_t y, std::size_t z) const {
  return {(static_cast<double>(x) + 0.5) * spacing_, (static_cast<double>(y) + 0.5) * spacing_,
          (static_cast<double>(z) + 0.5) * spacing_};
}

Depth Depth::levels(int p) {
  if (p < 1) throw InvalidArgument(fmt::format("gray-value depth must be >= 1, got {}", p));
  return Depth(p);
}

std::string Depth::to_string() const { return is_continuous() ? "continuous" : std::to_string(p_); }

long color_levels(int p) {
  if (p < 1) throw InvalidArgument(fmt::format("gray-value depth must be >= 1, got {}", p));
  const long cube = static_cast<long>(p) * p * p;
  return p == 1 ? 1 : cube - 1;
}

bool is_depth_value(double value, int p) {
  auto on_lattice = [value](long levels) {
    const double scaled = value * static_cast<double>(levels);
    return std::abs(scaled - std::round(scaled)) <= 1e-9 * static_cast<double>(levels);
  };
  const long cube = static_cast<long>(p) * p * p;
  return on_lattice(color_levels(p)) || on_lattice(cube);
}

VoxelGrid::VoxelGrid(Geometry geometry, std::vector<double> values, Depth depth)
    : geometry_(geometry), values_(std::move(values)), depth_(depth) {
  if (values_.size() != geometry_.count())
    throw InvalidArgument(fmt::format("value array has {} entries, grid needs {}", values_.size(),
                                      geometry_.count()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw InvalidArgument(fmt::format("gray value {} at index {} is outside [0, 1]", v, i));
    if (!depth_.is_continuous() && !is_depth_value(v, depth_.p()))
      throw InvalidArgument(
          fmt::format("gray value {} at index {} is not a depth-{} color", v, i, depth_.p()));
  }
}

VoxelGrid VoxelGrid::filled(Geometry geometry, double value, Depth depth) {
  return VoxelGrid(geometry, std::vector<double>(geometry.count(), value), depth);
}

double VoxelGrid::mean() const {
  const double sum = chunked_sum(values_.size(), 0.0, [&](std::size_t i) { return values_[i]; });
  return sum / static_cast<double>(values_.size());
}

// ---------------------------------------------------------------------------

namespace {

struct ShapeValidator {
  void operator()(const Ball& b) const {
    if (!(b.radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  }
  void operator()(const Cylinder& c) const {
    if (!(c.length > 0.0)) throw InvalidArgument("cylinder length must be positive");
    if (!(c.diameter > 0.0)) throw InvalidArgument("cylinder diameter must be positive");
    if (std::abs(c.axis.norm() - 1.0) > 1e-12)
      throw InvalidArgument(fmt::format("cylinder axis must be a unit vector (norm {})", c.axis.norm()));
  }
  void operator()(const Laminate& l) const {
    if (l.axis < 0 || l.axis > 2) throw InvalidArgument("laminate axis index must be 0, 1 or 2");
    if (l.slabs.empty()) throw InvalidArgument("laminate needs at least one slab");
    for (const auto& s : l.slabs)
      if (!(s[1] > s[0])) throw InvalidArgument("laminate slab must satisfy lo < hi");
  }
  void operator()(const Union& u) const {
    for (const Shape& m : u.members) validate(m);
  }
};

struct Containment {
  const Vec3& x;
  bool operator()(const Ball& b) const { return (x - b.center).squaredNorm() <= b.radius * b.radius; }
  bool operator()(const Cylinder& c) const {
    const Vec3 d = x - c.center;
    const double along = d.dot(c.axis);
    if (std::abs(along) > 0.5 * c.length) return false;
    const double radial2 = (d - along * c.axis).squaredNorm();
    const double r = 0.5 * c.diameter;
    return radial2 <= r * r;
  }
  bool operator()(const Laminate& l) const {
    const double t = x[l.axis];
    return std::any_of(l.slabs.begin(), l.slabs.end(),
                       [t](const auto& s) { return t >= s[0] && t <= s[1]; });
  }
  bool operator()(const Union& u) const {
    return std::any_of(u.members.begin(), u.members.end(),
                       [this](const Shape& m) { return contains(m, x); });
  }
};

struct Bounds {
  Box operator()(const Ball& b) const {
    const Vec3 r = Vec3::Constant(b.radius);
    return {b.center - r, b.center + r};
  }
  Box operator()(const Cylinder& c) const {
    Vec3 half;
    for (int i = 0; i < 3; ++i) {
      const double a = std::abs(c.axis[i]);
      half[i] = 0.5 * c.length * a + 0.5 * c.diameter * std::sqrt(std::max(0.0, 1.0 - a * a));
    }
    return {c.center - half, c.center + half};
  }
  Box operator()(const Laminate& l) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Box box{Vec3::Constant(-inf), Vec3::Constant(inf)};
    box.lo[l.axis] = inf;
    box.hi[l.axis] = -inf;
    for (const auto& s : l.slabs) {
      box.lo[l.axis] = std::min(box.lo[l.axis], s[0]);
      box.hi[l.axis] = std::max(box.hi[l.axis], s[1]);
    }
    return box;
  }
  Box operator()(const Union& u) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Box box{Vec3::Constant(inf), Vec3::Constant(-inf)};
    for (const Shape& m : u.members) {
      const Box b = bounding_box(m);
      box.lo = box.lo.cwiseMin(b.lo);
      box.hi = box.hi.cwiseMax(b.hi);
    }
    return box;
  }
};

bool box_inside(const Box& b, const Vec3& ext) {
  for (int i = 0; i < 3; ++i) {
    const double tol = 1e-9 * ext[i];
    if (!(std::isinf(b.lo[i]) || b.lo[i] >= -tol) || !(std::isinf(b.hi[i]) || b.hi[i] <= ext[i] + tol))
      return false;
  }
  return true;
}

// A convex shape containing all eight box corners contains the whole box.
bool covers_box(const Shape& shape, const Vec3& ext) {
  for (int c = 0; c < 8; ++c)
    if (!contains(shape, Vec3(c & 1 ? ext[0] : 0.0, c & 2 ? ext[1] : 0.0, c & 4 ? ext[2] : 0.0))) return false;
  return true;
}

// Shapes must not cross the periodic boundary. Shapes that contain the
// whole box are fine: nothing would be wrapped.
void check_inside_box(const Shape& shape, const Geometry& geometry) {
  const Vec3 ext = geometry.extent();
  if (const auto* u = std::get_if<Union>(&shape.kind)) {
    for (const Shape& m : u->members) check_inside_box(m, geometry);
    return;
  }
  if (const auto* l = std::get_if<Laminate>(&shape.kind)) {
    for (const auto& s : l->slabs) {
      const Shape slab{Laminate{l->axis, {s}}};
      if (!box_inside(bounding_box(slab), ext) && !covers_box(slab, ext))
        throw InvalidArgument(fmt::format("slab [{}, {}] crosses the box boundary along axis {} (extent {})", s[0],
                                          s[1], l->axis, ext[l->axis]));
    }
    return;
  }
  const Box b = bounding_box(shape);
  if (box_inside(b, ext) || covers_box(shape, ext)) return;
  for (int i = 0; i < 3; ++i)
    if (b.lo[i] < -1e-9 * ext[i] || b.hi[i] > ext[i] * (1 + 1e-9))
      throw InvalidArgument(fmt::format("shape extends outside the box along axis {}: [{}, {}] vs [0, {}]", i,
                                        b.lo[i], b.hi[i], ext[i]));
}

}  // namespace

void validate(const Shape& shape) { std::visit(ShapeValidator{}, shape.kind); }

bool contains(const Shape& shape, const Vec3& point) { return std::visit(Containment{point}, shape.kind); }

Box bounding_box(const Shape& shape) { return std::visit(Bounds{}, shape.kind); }

VoxelGrid voxelize(const Shape& shape, Dims dims, double spacing, int p) {
  if (p < 1) throw InvalidArgument(fmt::format("gray-value depth must be >= 1, got {}", p));
  const Geometry geometry(dims, spacing);
  validate(shape);
  check_inside_box(shape, geometry);

  const Box bounds = bounding_box(shape);
  const double sub = spacing / p;
  const double samples = static_cast<double>(p) * p * p;
  std::vector<double> values(geometry.count(), 0.0);

  parallel_for(geometry.count(), [&](std::size_t i) {
    const auto [x, y, z] = geometry.coords(i);
    const Vec3 corner(static_cast<double>(x) * spacing, static_cast<double>(y) * spacing,
                      static_cast<double>(z) * spacing);
    for (int a = 0; a < 3; ++a)
      if (corner[a] + spacing < bounds.lo[a] || corner[a] > bounds.hi[a]) return;
    int inside = 0;
    for (int k = 0; k < p; ++k)
      for (int j = 0; j < p; ++j)
        for (int l = 0; l < p; ++l) {
          const Vec3 pt = corner + Vec3((l + 0.5) * sub, (j + 0.5) * sub, (k + 0.5) * sub);
          inside += contains(shape, pt) ? 1 : 0;
        }
    values[i] = static_cast<double>(inside) / samples;
  });
  return VoxelGrid(geometry, std::move(values), Depth::levels(p));
}

VoxelGrid quantize(const VoxelGrid& grid, int p) {
  const double levels = static_cast<double>(color_levels(p));
  std::vector<double> out(grid.count());
  const auto in = grid.values();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::clamp(std::floor(in[i] * levels + 0.5) / levels, 0.0, 1.0);
  return VoxelGrid(grid.geometry(), std::move(out), Depth::levels(p));
}

VoxelGrid shift(const VoxelGrid& grid, const Offset3& offset) {
  const Geometry& g = grid.geometry();
  const auto in = grid.values();
  std::vector<double> out(grid.count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto [x, y, z] = g.coords(i);
    out[g.wrapped_index(static_cast<std::ptrdiff_t>(x) + offset[0],
                        static_cast<std::ptrdiff_t>(y) + offset[1],
                        static_cast<std::ptrdiff_t>(z) + offset[2])] = in[i];
  }
  return VoxelGrid(g, std::move(out), grid.depth());
}

// ---------------------------------------------------------------------------

std::vector<Cylinder> parallel_fiber_array(const Geometry& geometry, int axis, double length,
                                           double diameter, std::size_t rows, std::size_t cols) {
  if (axis < 0 || axis > 2) throw InvalidArgument("fiber axis index must be 0, 1 or 2");
  if (rows == 0 || cols == 0) throw InvalidArgument("fiber array needs at least one row and column");
  const int u = (axis + 1) % 3;
  const int v = (axis + 2) % 3;
  const Vec3 ext = geometry.extent();
  const double pitch_u = ext[u] / static_cast<double>(rows);
  const double pitch_v = ext[v] / static_cast<double>(cols);
  if (diameter >= std::min(pitch_u, pitch_v))
    throw InvalidArgument("fibers do not fit into the transverse lattice");
  if (length > ext[axis]) throw InvalidArgument("fiber length exceeds the box");

  std::vector<Cylinder> fibers;
  fibers.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      Vec3 center;
      center[axis] = 0.5 * ext[axis];
      center[u] = (static_cast<double>(r) + 0.5) * pitch_u;
      center[v] = (static_cast<double>(c) + 0.5) * pitch_v;
      fibers.push_back({center, Vec3::Unit(axis), length, diameter});
    }
  return fibers;
}

CellPlacement cell_fiber_placement(const std::vector<Vec3>& axes, double length, double diameter,
                                   double spacing, double gap) {
  if (axes.empty()) throw InvalidArgument("fiber placement needs at least one axis");
  const double reach = std::sqrt(length * length + diameter * diameter) + gap;
  const auto cell = static_cast<std::size_t>(std::ceil(reach / spacing));
  const std::size_t n = axes.size();
  const auto cx = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-12));
  const auto cy = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n) / static_cast<double>(cx)) - 1e-12));
  const std::size_t cz = (n + cx * cy - 1) / (cx * cy);

  CellPlacement placement{{}, cell, Dims{cx * cell, cy * cell, cz * cell}};
  const double edge = static_cast<double>(cell) * spacing;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ix = i % cx;
    const std::size_t iy = (i / cx) % cy;
    const std::size_t iz = i / (cx * cy);
    const Vec3 center((static_cast<double>(ix) + 0.5) * edge, (static_cast<double>(iy) + 0.5) * edge,
                      (static_cast<double>(iz) + 0.5) * edge);
    placement.fibers.push_back({center, axes[i].normalized(), length, diameter});
  }
  return placement;
}

Shape make_union(const std::vector<Cylinder>& fibers) {
  Union u;
  u.members.reserve(fibers.size());
  for (const Cylinder& c : fibers) u.members.push_back(Shape{c});
  return Shape{std::move(u)};
}

}  // namespace minkvox
