#include "minkvox/fiberorient.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "minkvox/error.hpp"
#include "minkvox/minkowski.hpp"
#include "minkvox/parallel.hpp"

namespace minkvox {

namespace {

constexpr double kTieTolerance = 1e-12;

SymTensor3 smallest_direction_projector(const SymTensor3& t) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t.matrix());
  const auto& l = solver.eigenvalues();  // ascending
  const auto& v = solver.eigenvectors();
  const double tol = kTieTolerance * std::max(std::abs(l[0]), std::abs(l[2]));
  if (l[2] - l[0] <= tol) return SymTensor3::identity() / 3.0;
  if (l[1] - l[0] <= tol) return (SymTensor3::identity() - SymTensor3::outer(v.col(2))) / 2.0;
  return SymTensor3::outer(v.col(0));
}

}  // namespace

OrientationResult structure_tensor_orientation(const VoxelGrid& image, const OrientationSettings& settings) {
  if (settings.second.type() == Kernel::Type::None)
    throw InvalidArgument("the structure-tensor method needs a second (tensor) filter");
  if (!(settings.mask_rel >= 0.0 && settings.mask_rel <= 1.0))
    throw InvalidArgument(fmt::format("mask threshold must lie in [0, 1], got {}", settings.mask_rel));

  const Geometry& geo = image.geometry();
  const VoxelGrid filtered = fft_convolve(image, settings.first);
  const VectorField g = gradient(filtered, settings.scheme);

  // Six components of g (x) g, each blurred by the second filter.
  constexpr int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  const PeriodicConvolver blur(geo, settings.second);
  std::array<std::vector<double>, 6> blurred;
  std::vector<double> component(geo.count());
  for (int c = 0; c < 6; ++c) {
    for (std::size_t i = 0; i < component.size(); ++i)
      component[i] = g.vectors[i][pairs[c][0]] * g.vectors[i][pairs[c][1]];
    blurred[c] = blur.apply(component);
  }
  auto local = [&](std::size_t i) {
    return SymTensor3(blurred[0][i], blurred[1][i], blurred[2][i], blurred[3][i], blurred[4][i],
                      blurred[5][i]);
  };

  double max_trace = 0.0;
  for (std::size_t i = 0; i < geo.count(); ++i)
    max_trace = std::max(max_trace, blurred[0][i] + blurred[1][i] + blurred[2][i]);
  if (!(max_trace > 0.0))
    throw DegenerateImage("structure tensor vanishes everywhere: the image has no structure");
  const double threshold = settings.mask_rel * max_trace;
  const bool keep_all = settings.mask_rel == 0.0;
  auto in_mask = [&](std::size_t i) {
    return keep_all || blurred[0][i] + blurred[1][i] + blurred[2][i] >= threshold;
  };

  const std::size_t masked =
      chunked_sum(geo.count(), std::size_t{0}, [&](std::size_t i) { return std::size_t{in_mask(i)}; });
  if (masked == 0) throw DegenerateImage("no voxel passes the structure-tensor mask");

  const SymTensor3 sum = chunked_sum(geo.count(), SymTensor3::zero(), [&](std::size_t i) {
    return in_mask(i) ? smallest_direction_projector(local(i)) : SymTensor3::zero();
  });

  OrientationResult out;
  out.a = sum / sum.trace();
  const double residue = (1.0 - out.a.trace()) / 3.0;
  out.a += SymTensor3::diag(residue, residue, residue);
  out.settings = settings;
  out.masked_voxels = masked;
  return out;
}

double orientation_error(const SymTensor3& estimate, const SymTensor3& reference) {
  return tensor_error(estimate, reference);
}

}  // namespace minkvox
