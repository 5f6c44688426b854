#include "minkvox/minkowski.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "minkvox/error.hpp"
#include "minkvox/parallel.hpp"

namespace minkvox {

double estimate_volume(const VoxelGrid& image) {
  const auto v = image.values();
  return chunked_sum(v.size(), 0.0, [&](std::size_t i) { return v[i]; }) *
         image.geometry().voxel_volume();
}

double estimate_surface(const VectorField& gradient) {
  const auto& g = gradient.vectors;
  return chunked_sum(g.size(), 0.0, [&](std::size_t i) { return g[i].norm(); }) *
         gradient.geometry.voxel_volume();
}

SymTensor3 estimate_w(const VectorField& gradient, double eps_rel) {
  if (!(eps_rel > 0.0)) throw InvalidArgument(fmt::format("eps_rel must be positive, got {}", eps_rel));
  const auto& g = gradient.vectors;
  double max_norm = 0.0;
  for (const Vec3& v : g) max_norm = std::max(max_norm, v.norm());
  if (max_norm == 0.0) return SymTensor3::zero();
  const double eps = eps_rel * max_norm;
  SymTensor3 sum = chunked_sum(g.size(), SymTensor3::zero(), [&](std::size_t i) {
    const double norm = g[i].norm();
    if (norm == 0.0) return SymTensor3::zero();
    return SymTensor3::outer(g[i]) / (norm + eps);
  });
  return sum * (gradient.geometry.voxel_volume() / 3.0);
}

SymTensor3 qnt(const SymTensor3& w, double scale) {
  const double tr = w.trace();
  if (!(tr > 1e-14 * scale))
    throw DegenerateImage(fmt::format("tr(W) = {} is not positive: the image has no interface", tr));
  SymTensor3 q = w / tr;
  // Put the trace residue on the diagonal so tr(q) == 1 up to one rounding.
  const double residue = (1.0 - q.trace()) / 3.0;
  return q + SymTensor3::diag(residue, residue, residue);
}

double eigenvalue_ratio(const SymTensor3& t) {
  const Eigensystem es = eigen(t);
  double lo = std::abs(es.values[0]);
  double hi = lo;
  for (double v : es.values) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  if (hi == 0.0) throw InvalidArgument("eigenvalue ratio of the zero tensor is undefined");
  return lo / hi;
}

MinkowskiSummary analyze(const VoxelGrid& image, const AnalysisSettings& settings) {
  MinkowskiSummary s;
  s.settings = settings;
  s.depth = image.depth();
  s.spacing = image.spacing();
  s.dims = image.dims();

  const VoxelGrid filtered = fft_convolve(image, settings.kernel);
  const VectorField g = gradient(filtered, settings.scheme);
  s.volume = estimate_volume(image);
  s.surface = estimate_surface(g);
  s.w = estimate_w(g, settings.eps_rel);

  // Round-off gradients of a uniform image sum to at most ~1e-16 h^2 per voxel.
  const double h = image.spacing();
  const double scale = static_cast<double>(image.count()) * h * h;
  try {
    s.qnt = qnt(s.w, scale);
    s.beta = eigenvalue_ratio(*s.qnt);
  } catch (const DegenerateImage&) {
    s.degenerate = true;
    s.surface = 0.0;
    s.w = SymTensor3::zero();
  }
  return s;
}

double tensor_error(const SymTensor3& estimate, const SymTensor3& reference) {
  const double ref = reference.frobenius();
  if (ref == 0.0) throw InvalidArgument("relative tensor error needs a nonzero reference");
  return (reference - estimate).frobenius() / ref;
}

}  // namespace minkvox
