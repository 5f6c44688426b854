#pragma once

#include <array>

#include <Eigen/Core>

#include "minkvox/voxelgrid.hpp"

namespace minkvox {

/// Symmetric 3x3 tensor stored as (xx, yy, zz, xy, xz, yz).
class SymTensor3 {
 public:
  SymTensor3() : c_{} {}
  SymTensor3(double xx, double yy, double zz, double xy, double xz, double yz)
      : c_{xx, yy, zz, xy, xz, yz} {}

  static SymTensor3 zero() { return {}; }
  static SymTensor3 identity() { return diag(1.0, 1.0, 1.0); }
  static SymTensor3 diag(double a, double b, double c) { return {a, b, c, 0.0, 0.0, 0.0}; }
  /// v (x) v
  static SymTensor3 outer(const Vec3& v);
  /// Symmetric part of m.
  static SymTensor3 from_matrix(const Eigen::Matrix3d& m);

  double operator()(int i, int j) const;
  const std::array<double, 6>& components() const { return c_; }
  Eigen::Matrix3d matrix() const;

  double trace() const { return c_[0] + c_[1] + c_[2]; }
  double frobenius() const;
  /// R T R^T
  SymTensor3 conjugated(const Eigen::Matrix3d& rotation) const;

  SymTensor3& operator+=(const SymTensor3& o);
  SymTensor3& operator-=(const SymTensor3& o);
  SymTensor3& operator*=(double s);
  SymTensor3& operator/=(double s) { return *this *= 1.0 / s; }

  friend SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
  friend SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
  friend SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
  friend SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
  friend SymTensor3 operator/(SymTensor3 a, double s) { return a /= s; }
  bool operator==(const SymTensor3&) const = default;

 private:
  std::array<double, 6> c_;
};

/// Eigenvalues in descending order; column k of `vectors` belongs to
/// values[k] and has its largest-magnitude component positive.
struct Eigensystem {
  std::array<double, 3> values;
  Eigen::Matrix3d vectors;
};

Eigensystem eigen(const SymTensor3& t);

/// Totally symmetric fourth-order tensor with 15 independent components,
/// one per index multiset {i <= j <= k <= l}, in lexicographic order:
/// 0000 0001 0002 0011 0012 0022 0111 0112 0122 0222 1111 1112 1122 1222 2222.
class SymTensor4 {
 public:
  SymTensor4() : c_{} {}
  /// p (x) p (x) p (x) p
  static SymTensor4 outer(const Vec3& p);
  static int slot(int i, int j, int k, int l);

  double operator()(int i, int j, int k, int l) const { return c_[slot(i, j, k, l)]; }
  const std::array<double, 15>& components() const { return c_; }
  /// Contraction A4_ijkk, a second-order tensor.
  SymTensor3 contract() const;

  SymTensor4& operator+=(const SymTensor4& o);
  SymTensor4& operator*=(double s);

 private:
  std::array<double, 15> c_;
};

}  // namespace minkvox
