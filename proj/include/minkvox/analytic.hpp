#pragma once

#include <vector>

#include "minkvox/tensor.hpp"
#include "minkvox/voxelgrid.hpp"

namespace minkvox {

struct BallQuantities {
  double volume;
  double surface;
  SymTensor3 w;
  SymTensor3 qnt;
  double mean_curvature_integral;  // V_1
  double euler;                    // V_0
};

BallQuantities ball_quantities(double radius);

/// Volume of the parallel body of a ball via the Steiner polynomial
/// V + eps S + pi eps^2 V_1 + (4 pi / 3) eps^3 V_0.
double steiner_volume(double radius, double eps);

/// Straight flat-capped cylinder with unit axis p, length L and diameter D.
struct FiberSpec {
  Vec3 axis;
  double length;
  double diameter;

  double aspect_ratio() const { return length / diameter; }
};

void validate(const FiberSpec& fiber);

/// Rotation taking e_z to `axis` (minimal rotation; 180 deg about e_x for -e_z).
Eigen::Matrix3d rotation_from_ez(const Vec3& axis);

/// (pi D^2 / 6) [p (x) p + (L/D) (I - p (x) p)]
SymTensor3 cylinder_w(const FiberSpec& fiber);

/// [p (x) p + (L/D) (I - p (x) p)] / (1 + 2 L/D)
SymTensor3 fiber_qnt(const FiberSpec& fiber);

struct FiberSystemTensors {
  SymTensor3 a;   // mean p (x) p
  SymTensor4 a4;  // mean p (x) p (x) p (x) p
  SymTensor3 w;   // sum of cylinder_w
  SymTensor3 qnt; // w / tr(w)
};

FiberSystemTensors fiber_system_tensors(const std::vector<FiberSpec>& fibers);

FiberSpec fiber_spec(const Cylinder& cylinder);

}  // namespace minkvox
