#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "minkvox/voxelgrid.hpp"

namespace minkvox {

/// Smoothing kernel with dimensionless width sigma; the physical width is
/// spacing * sigma. The Gaussian is truncated at three widths.
class Kernel {
 public:
  enum class Type { None, Gaussian, Ball };

  static Kernel none() { return Kernel(Type::None, 0.0); }
  static Kernel gaussian(double sigma);
  static Kernel ball(double sigma);
  /// Parses "none", "gaussian" or "ball"; sigma is ignored for "none".
  static Kernel from_name(const std::string& name, double sigma);

  Type type() const { return type_; }
  double sigma() const { return sigma_; }
  std::string name() const;
  /// Support radius in voxel units (0 for None).
  double support_radius() const;

  bool operator==(const Kernel&) const = default;

 private:
  Kernel(Type type, double sigma) : type_(type), sigma_(sigma) {}
  Type type_;
  double sigma_;
};

/// Kernel sampled at voxel-center offsets in wrap-around layout (peak at
/// index 0), renormalized so that sum(values) * h^3 == 1.
ScalarField sample_kernel(const Kernel& kernel, const Geometry& geometry);

/// Periodic convolution with a fixed kernel via real-to-complex FFTs. The
/// kernel spectrum is computed once; apply() may be called concurrently.
class PeriodicConvolver {
 public:
  PeriodicConvolver(const Geometry& geometry, const Kernel& kernel);
  ~PeriodicConvolver();
  PeriodicConvolver(const PeriodicConvolver&) = delete;
  PeriodicConvolver& operator=(const PeriodicConvolver&) = delete;

  const Geometry& geometry() const { return geometry_; }
  std::vector<double> apply(std::span<const double> field) const;

 private:
  struct Plans;
  Geometry geometry_;
  std::unique_ptr<Plans> plans_;
  std::vector<std::complex<double>> spectrum_;
};

/// Filtered image F * chi. Kernel None returns the input unchanged; otherwise
/// the result has continuous depth. Round-off excursions up to 1e-6 outside
/// [0, 1] are clamped, larger ones raise NumericalError.
VoxelGrid fft_convolve(const VoxelGrid& image, const Kernel& kernel);

/// Periodic convolution of an unconstrained field (no clamping).
ScalarField convolve(const ScalarField& field, const Kernel& kernel);

}  // namespace minkvox
