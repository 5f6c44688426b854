#include "minkvox/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <numbers>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "minkvox/error.hpp"

namespace minkvox {

using std::numbers::pi;

BallQuantities ball_quantities(double radius) {
  if (!(radius > 0.0)) throw InvalidArgument(fmt::format("ball radius must be positive, got {}", radius));
  const double r2 = radius * radius;
  const double s = 4.0 * pi * r2;
  return {4.0 * pi * r2 * radius / 3.0, s, SymTensor3::identity() * (s / 9.0),
          SymTensor3::identity() / 3.0, 4.0 * radius, 1.0};
}

double steiner_volume(double radius, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("parallel distance must be non-negative");
  const BallQuantities q = ball_quantities(radius);
  return q.volume + eps * q.surface + pi * eps * eps * q.mean_curvature_integral +
         4.0 * pi / 3.0 * eps * eps * eps * q.euler;
}

void validate(const FiberSpec& fiber) {
  if (std::abs(fiber.axis.norm() - 1.0) > 1e-12)
    throw InvalidArgument(fmt::format("fiber axis must be a unit vector (norm {})", fiber.axis.norm()));
  if (!(fiber.length > 0.0) || !(fiber.diameter > 0.0))
    throw InvalidArgument("fiber length and diameter must be positive");
}

Eigen::Matrix3d rotation_from_ez(const Vec3& axis) {
  const Vec3 ez = Vec3::UnitZ();
  const Vec3 p = axis.normalized();
  const Vec3 k = ez.cross(p);
  const double c = ez.dot(p);
  const double s = k.norm();
  if (s < 1e-15) {
    if (c > 0.0) return Eigen::Matrix3d::Identity();
    return Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  }
  // Rodrigues: R = I + [k]x + [k]x^2 (1 - c) / s^2
  Eigen::Matrix3d kx;
  kx << 0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0;
  return Eigen::Matrix3d::Identity() + kx + kx * kx * ((1.0 - c) / (s * s));
}

namespace {

// Bracket p (x) p + ratio (I - p (x) p) built as the axis-aligned tensor
// conjugated by the rotation taking e_z to p.
SymTensor3 transversely_isotropic(const Vec3& axis, double ratio) {
  const SymTensor3 aligned = SymTensor3::diag(ratio, ratio, 1.0);
  return aligned.conjugated(rotation_from_ez(axis));
}

}  // namespace

SymTensor3 cylinder_w(const FiberSpec& fiber) {
  validate(fiber);
  const double d = fiber.diameter;
  return transversely_isotropic(fiber.axis, fiber.aspect_ratio()) * (pi * d * d / 6.0);
}

SymTensor3 fiber_qnt(const FiberSpec& fiber) {
  validate(fiber);
  const double ratio = fiber.aspect_ratio();
  SymTensor3 q = transversely_isotropic(fiber.axis, ratio) / (1.0 + 2.0 * ratio);
  const double residue = (1.0 - q.trace()) / 3.0;
  return q + SymTensor3::diag(residue, residue, residue);
}

FiberSystemTensors fiber_system_tensors(const std::vector<FiberSpec>& fibers) {
  if (fibers.empty()) throw InvalidArgument("fiber system needs at least one fiber");
  // Sum in a canonical order so the result is exactly permutation invariant.
  std::vector<FiberSpec> sorted = fibers;
  std::sort(sorted.begin(), sorted.end(), [](const FiberSpec& a, const FiberSpec& b) {
    return std::tie(a.axis[0], a.axis[1], a.axis[2], a.length, a.diameter) <
           std::tie(b.axis[0], b.axis[1], b.axis[2], b.length, b.diameter);
  });
  FiberSystemTensors out;
  for (const FiberSpec& f : sorted) {
    validate(f);
    out.a += SymTensor3::outer(f.axis);
    out.a4 += SymTensor4::outer(f.axis);
    out.w += cylinder_w(f);
  }
  const double n = static_cast<double>(fibers.size());
  out.a /= n;
  out.a4 *= 1.0 / n;
  out.qnt = out.w / out.w.trace();
  return out;
}

FiberSpec fiber_spec(const Cylinder& cylinder) {
  return {cylinder.axis, cylinder.length, cylinder.diameter};
}

}  // namespace minkvox
