#include "minkvox/gradient.hpp"

#include <fmt/format.h>

#include "minkvox/error.hpp"
#include "minkvox/parallel.hpp"

namespace minkvox {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Forward: return "forward";
    case Scheme::Backward: return "backward";
    case Scheme::Central: break;
  }
  return "central";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "central") return Scheme::Central;
  if (name == "forward") return Scheme::Forward;
  if (name == "backward") return Scheme::Backward;
  throw InvalidArgument(fmt::format("unknown gradient scheme '{}' (expected central, forward or backward)", name));
}

VectorField gradient(const Geometry& geometry, std::span<const double> values, Scheme scheme) {
  if (values.size() != geometry.count())
    throw InvalidArgument(fmt::format("field has {} samples, grid needs {}", values.size(), geometry.count()));
  const Dims& d = geometry.dims();
  const double h = geometry.spacing();
  // Linear strides along x, y, z and the wrap corrections at the faces.
  const std::size_t stride[3] = {1, d.nx, d.nx * d.ny};

  VectorField out{geometry, std::vector<Vec3>(geometry.count()), scheme};
  parallel_for(geometry.count(), [&](std::size_t i) {
    const auto c = geometry.coords(i);
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
      const std::size_t n = d[a];
      const std::size_t s = stride[a];
      const std::size_t up = c[a] + 1 == n ? i - (n - 1) * s : i + s;
      const std::size_t down = c[a] == 0 ? i + (n - 1) * s : i - s;
      switch (scheme) {
        case Scheme::Central: g[a] = (values[up] - values[down]) / (2.0 * h); break;
        case Scheme::Forward: g[a] = (values[up] - values[i]) / h; break;
        case Scheme::Backward: g[a] = (values[i] - values[down]) / h; break;
      }
    }
    out.vectors[i] = g;
  });
  return out;
}

VectorField gradient(const VoxelGrid& image, Scheme scheme) {
  return gradient(image.geometry(), image.values(), scheme);
}

VectorField unit_normals(const VectorField& field) {
  VectorField out{field.geometry, std::vector<Vec3>(field.vectors.size()), field.scheme};
  for (std::size_t i = 0; i < field.vectors.size(); ++i) {
    const double norm = field.vectors[i].norm();
    out.vectors[i] = norm > 0.0 ? Vec3(-field.vectors[i] / norm) : Vec3::Zero();
  }
  return out;
}

}  // namespace minkvox
