#pragma once

#include <span>
#include <string>
#include <vector>

#include "minkvox/voxelgrid.hpp"

namespace minkvox {

enum class Scheme { Forward, Backward, Central };

std::string to_string(Scheme scheme);
Scheme scheme_from_name(const std::string& name);

/// Per-voxel 3-vectors in units 1/length, on the geometry of the source image.
struct VectorField {
  Geometry geometry;
  std::vector<Vec3> vectors;
  Scheme scheme;
};

/// Finite-difference gradient with periodic wrap:
///   Central   (f(x + h e_i) - f(x - h e_i)) / 2h
///   Forward   (f(x + h e_i) - f(x)) / h
///   Backward  (f(x) - f(x - h e_i)) / h
VectorField gradient(const Geometry& geometry, std::span<const double> values, Scheme scheme);
VectorField gradient(const VoxelGrid& image, Scheme scheme);

/// Outward unit normals n = -g / |g|; zero where g vanishes.
VectorField unit_normals(const VectorField& field);

}  // namespace minkvox
