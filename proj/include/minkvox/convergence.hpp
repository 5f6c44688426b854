#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "minkvox/filters.hpp"
#include "minkvox/gradient.hpp"
#include "minkvox/tensor.hpp"
#include "minkvox/voxelgrid.hpp"

namespace minkvox {

enum class StudyShape { Ball, Cylinder };

/// Multigrid study of a single ball (or an x-aligned cylinder) whose diameter
/// is resolved by D/h voxels.
struct ConvergenceStudy {
  StudyShape shape = StudyShape::Ball;
  double diameter = 16.0;      // um
  double box = 24.0;           // um; cube edge (ball) or transverse edge (cylinder)
  double aspect_ratio = 10.0;  // cylinder only
  Vec3 displacement{0.3, 0.1, 0.2};  // shape center offset from the box center, in voxels
  std::vector<double> resolutions{4, 6, 8, 12, 16};
  std::vector<int> depths{1, 2, 3, 4};
  std::vector<Kernel> kernels{Kernel::none()};
  Scheme scheme = Scheme::Central;
  double eps_rel = 1e-12;
};

struct StudyCase {
  VoxelGrid image;
  double volume_ref;
  double surface_ref;
  SymTensor3 w_ref;
  SymTensor3 qnt_ref;
};

/// Voxelized shape and its closed-form quantities for one (D/h, p) point.
/// Throws InvalidArgument if the box is not an integer number of voxels.
StudyCase make_study_case(const ConvergenceStudy& study, double d_over_h, int p);

struct ConvergenceRow {
  double d_over_h;
  int p;
  Kernel kernel;
  Scheme scheme;
  double volume;
  double surface;
  double e;      // relative Frobenius error of W
  double e_bar;  // relative Frobenius error of QNT (NaN if degenerate)
  double volume_ref;
  double surface_ref;
  double seconds;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;     // sorted by D/h, then p, then kernel
  std::vector<std::string> skipped;     // infeasible grid points with the reason
};

ConvergenceResult run_convergence(const ConvergenceStudy& study);

/// Columns: D_over_h,p,kernel,sigma,scheme,V,S,E,E_bar,V_ref,S_ref,wall_time_s.
/// With timing disabled the time column is written as 0 so output is byte-stable.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows, bool timing = true);

}  // namespace minkvox
