#pragma once

#include <optional>

#include "minkvox/filters.hpp"
#include "minkvox/gradient.hpp"
#include "minkvox/tensor.hpp"
#include "minkvox/voxelgrid.hpp"

namespace minkvox {

inline constexpr double kDefaultEpsRel = 1e-12;

struct AnalysisSettings {
  Kernel kernel = Kernel::ball(1.2);
  Scheme scheme = Scheme::Central;
  double eps_rel = kDefaultEpsRel;
};

struct MinkowskiSummary {
  double volume = 0.0;   // length^3
  double surface = 0.0;  // length^2
  SymTensor3 w;          // W_1^{0,2}, length^2
  // Absent when the image has no interface (all solid or all void).
  std::optional<SymTensor3> qnt;
  std::optional<double> beta;
  bool degenerate = false;

  AnalysisSettings settings;
  Depth depth = Depth::continuous();
  double spacing = 0.0;
  Dims dims;
};

/// Sum of gray values times h^3 on the unfiltered image.
double estimate_volume(const VoxelGrid& image);

/// Sum of |g| h^3.
double estimate_surface(const VectorField& gradient);

/// (1/3) sum g (x) g h^3 / (|g| + eps), eps = eps_rel * max |g|. Voxels with
/// g = 0 are skipped; a zero field yields the zero tensor.
SymTensor3 estimate_w(const VectorField& gradient, double eps_rel = kDefaultEpsRel);

/// W / tr(W), trace renormalized to one. Throws DegenerateImage when
/// tr(W) <= 1e-14 * scale.
SymTensor3 qnt(const SymTensor3& w, double scale = 1.0);

/// min |lambda| / max |lambda|. Throws InvalidArgument for the zero tensor.
double eigenvalue_ratio(const SymTensor3& t);

/// filter -> gradient -> V, S, W -> QNT -> beta. V uses the unfiltered image.
MinkowskiSummary analyze(const VoxelGrid& image, const AnalysisSettings& settings = {});

/// ||reference - estimate||_F / ||reference||_F.
double tensor_error(const SymTensor3& estimate, const SymTensor3& reference);

}  // namespace minkvox
