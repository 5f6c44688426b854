#pragma once

#include <cstddef>

#include "minkvox/filters.hpp"
#include "minkvox/gradient.hpp"
#include "minkvox/tensor.hpp"
#include "minkvox/voxelgrid.hpp"

namespace minkvox {

struct OrientationSettings {
  Kernel first = Kernel::ball(1.2);
  Kernel second = Kernel::gaussian(6.0);
  Scheme scheme = Scheme::Central;
  /// Voxels with tr(I_mu) below mask_rel * max tr(I_mu) are ignored; 0 keeps all voxels.
  double mask_rel = 1e-3;
};

struct OrientationResult {
  SymTensor3 a;  // trace one
  OrientationSettings settings;
  std::size_t masked_voxels = 0;
};

/// Structure-tensor estimate of the second-order fiber-orientation tensor:
/// blur, gradient, g (x) g, component-wise second blur, then the average of
/// the per-voxel eigenvector of the smallest eigenvalue over the mask.
/// Tied smallest eigenvalues contribute the normalized projector onto the
/// tied eigenspace.
OrientationResult structure_tensor_orientation(const VoxelGrid& image,
                                               const OrientationSettings& settings = {});

/// ||reference - estimate||_F / ||reference||_F.
double orientation_error(const SymTensor3& estimate, const SymTensor3& reference);

}  // namespace minkvox
