#include "minkvox/convergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "minkvox/analytic.hpp"
#include "minkvox/error.hpp"
#include "minkvox/minkowski.hpp"
#include "minkvox/report.hpp"

namespace minkvox {

namespace {

std::size_t voxel_count(double length, double h, const char* what) {
  const double n = length / h;
  const double rounded = std::round(n);
  if (rounded < 2.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
    throw InvalidArgument(fmt::format("{} of {} um is not an integer number of voxels of {} um", what, length, h));
  return static_cast<std::size_t>(rounded);
}

}  // namespace

StudyCase make_study_case(const ConvergenceStudy& study, double d_over_h, int p) {
  if (!(d_over_h > 0.0)) throw InvalidArgument("D/h must be positive");
  if (!(study.diameter > 0.0) || !(study.box > study.diameter))
    throw InvalidArgument("the box must be larger than the shape diameter");
  const double d = study.diameter;
  const double h = d / d_over_h;
  const double r = 0.5 * d;

  if (study.shape == StudyShape::Ball) {
    const std::size_t n = voxel_count(study.box, h, "box edge");
    const Vec3 center = Vec3::Constant(0.5 * study.box) + h * study.displacement;
    VoxelGrid image = voxelize(Shape{Ball{center, r}}, Dims{n, n, n}, h, p);
    const BallQuantities q = ball_quantities(r);
    return {std::move(image), q.volume, q.surface, q.w, q.qnt};
  }

  const double length = study.aspect_ratio * d;
  const std::size_t nt = voxel_count(study.box, h, "transverse box edge");
  const std::size_t na = voxel_count(length + study.box - d, h, "axial box edge");
  const Vec3 center =
      Vec3(0.5 * static_cast<double>(na) * h, 0.5 * study.box, 0.5 * study.box) + h * study.displacement;
  VoxelGrid image = voxelize(Shape{Cylinder{center, Vec3::UnitX(), length, d}}, Dims{na, nt, nt}, h, p);
  const FiberSpec fiber{Vec3::UnitX(), length, d};
  const double pi = std::numbers::pi;
  return {std::move(image), pi * r * r * length, 2.0 * pi * r * r + 2.0 * pi * r * length, cylinder_w(fiber),
          fiber_qnt(fiber)};
}

ConvergenceResult run_convergence(const ConvergenceStudy& study) {
  ConvergenceResult result;
  for (double dh : study.resolutions)
    for (int p : study.depths) {
      const StudyCase c = make_study_case(study, dh, p);
      for (const Kernel& kernel : study.kernels) {
        const auto start = std::chrono::steady_clock::now();
        MinkowskiSummary s;
        try {
          s = analyze(c.image, {kernel, study.scheme, study.eps_rel});
        } catch (const InvalidArgument& e) {
          result.skipped.push_back(fmt::format("D/h={} p={} kernel={}:{}: {}", dh, p, kernel.name(),
                                               kernel.sigma(), e.what()));
          continue;
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double e_bar = s.qnt ? tensor_error(*s.qnt, c.qnt_ref) : std::numeric_limits<double>::quiet_NaN();
        result.rows.push_back({dh, p, kernel, study.scheme, s.volume, s.surface, tensor_error(s.w, c.w_ref), e_bar,
                               c.volume_ref, c.surface_ref, seconds});
      }
    }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const ConvergenceRow& a, const ConvergenceRow& b) {
    const auto ka = a.kernel.name(), kb = b.kernel.name();
    return std::tie(a.d_over_h, a.p, ka) < std::tie(b.d_over_h, b.p, kb) ||
           (std::tie(a.d_over_h, a.p, ka) == std::tie(b.d_over_h, b.p, kb) && a.kernel.sigma() < b.kernel.sigma());
  });
  return result;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows, bool timing) {
  out << "D_over_h,p,kernel,sigma,scheme,V,S,E,E_bar,V_ref,S_ref,wall_time_s\n";
  for (const ConvergenceRow& r : rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", format_number(r.d_over_h), r.p, r.kernel.name(),
                       format_number(r.kernel.sigma()), to_string(r.scheme), format_number(r.volume),
                       format_number(r.surface), format_number(r.e), format_number(r.e_bar),
                       format_number(r.volume_ref), format_number(r.surface_ref),
                       format_number(timing ? r.seconds : 0.0));
}

}  // namespace minkvox
