#include "minkvox/filters.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "minkvox/error.hpp"

namespace minkvox {

namespace {

// The FFTW planner is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

std::size_t spectrum_size(const Dims& d) { return d.nz * d.ny * (d.nx / 2 + 1); }

}  // namespace

Kernel Kernel::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument(fmt::format("Gaussian width must be positive, got {}", sigma));
  return Kernel(Type::Gaussian, sigma);
}

Kernel Kernel::ball(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument(fmt::format("ball radius must be positive, got {}", sigma));
  return Kernel(Type::Ball, sigma);
}

Kernel Kernel::from_name(const std::string& name, double sigma) {
  if (name == "none") return none();
  if (name == "gaussian") return gaussian(sigma);
  if (name == "ball") return ball(sigma);
  throw InvalidArgument(fmt::format("unknown kernel '{}' (expected none, gaussian or ball)", name));
}

std::string Kernel::name() const {
  switch (type_) {
    case Type::Gaussian: return "gaussian";
    case Type::Ball: return "ball";
    case Type::None: break;
  }
  return "none";
}

double Kernel::support_radius() const {
  switch (type_) {
    case Type::Gaussian: return 3.0 * sigma_;
    case Type::Ball: return sigma_;
    case Type::None: break;
  }
  return 0.0;
}

ScalarField sample_kernel(const Kernel& kernel, const Geometry& geometry) {
  if (kernel.type() == Kernel::Type::None)
    throw InvalidArgument("cannot sample the identity kernel");
  const Dims& d = geometry.dims();
  const double radius = kernel.support_radius();
  for (int a = 0; a < 3; ++a)
    if (!(radius < 0.5 * static_cast<double>(d[a])))
      throw InvalidArgument(fmt::format(
          "{} kernel support radius {} voxels does not fit in half the box ({} voxels along axis {})",
          kernel.name(), radius, 0.5 * static_cast<double>(d[a]), a));

  const double h = geometry.spacing();
  const double hs = h * kernel.sigma();
  const double sigma2 = kernel.sigma() * kernel.sigma();
  const double cutoff2 = radius * radius;
  const auto reach = static_cast<std::ptrdiff_t>(std::floor(radius));

  std::vector<double> values(geometry.count(), 0.0);
  double sum = 0.0;
  for (std::ptrdiff_t k = -reach; k <= reach; ++k)
    for (std::ptrdiff_t j = -reach; j <= reach; ++j)
      for (std::ptrdiff_t i = -reach; i <= reach; ++i) {
        const auto r2 = static_cast<double>(i * i + j * j + k * k);
        if (r2 > cutoff2) continue;
        double w = 0.0;
        if (kernel.type() == Kernel::Type::Ball) {
          w = 3.0 / (4.0 * std::numbers::pi * hs * hs * hs);
        } else {
          w = std::exp(-r2 / (2.0 * sigma2)) / (hs * hs * hs * std::pow(2.0 * std::numbers::pi, 1.5));
        }
        values[geometry.wrapped_index(i, j, k)] = w;
        sum += w;
      }
  const double mass = sum * geometry.voxel_volume();
  for (double& v : values) v /= mass;
  return {geometry, std::move(values)};
}

// ---------------------------------------------------------------------------

struct PeriodicConvolver::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PeriodicConvolver::PeriodicConvolver(const Geometry& geometry, const Kernel& kernel)
    : geometry_(geometry), plans_(std::make_unique<Plans>()) {
  const ScalarField sampled = sample_kernel(kernel, geometry);
  const Dims& d = geometry.dims();
  const std::size_t n = geometry.count();
  const std::size_t m = spectrum_size(d);
  const auto nz = static_cast<int>(d.nz), ny = static_cast<int>(d.ny), nx = static_cast<int>(d.nx);

  RealBuffer real = alloc_real(n);
  ComplexBuffer freq = alloc_complex(m);
  {
    std::lock_guard lock(planner_mutex());
    // FFTW is row-major with the last index fastest, so x maps to the last dimension.
    plans_->forward = fftw_plan_dft_r2c_3d(nz, ny, nx, real.get(), freq.get(), FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_3d(nz, ny, nx, freq.get(), real.get(), FFTW_ESTIMATE);
  }
  if (!plans_->forward || !plans_->backward) throw NumericalError("FFTW planning failed");

  const double weight = geometry.voxel_volume() / static_cast<double>(n);
  std::copy(sampled.values.begin(), sampled.values.end(), real.get());
  fftw_execute_dft_r2c(plans_->forward, real.get(), freq.get());
  spectrum_.resize(m);
  for (std::size_t i = 0; i < m; ++i) spectrum_[i] = {freq[i][0] * weight, freq[i][1] * weight};
}

PeriodicConvolver::~PeriodicConvolver() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

std::vector<double> PeriodicConvolver::apply(std::span<const double> field) const {
  const std::size_t n = geometry_.count();
  if (field.size() != n)
    throw InvalidArgument(fmt::format("field has {} samples, convolver expects {}", field.size(), n));
  const std::size_t m = spectrum_.size();
  RealBuffer real = alloc_real(n);
  ComplexBuffer freq = alloc_complex(m);
  std::copy(field.begin(), field.end(), real.get());
  fftw_execute_dft_r2c(plans_->forward, real.get(), freq.get());
  for (std::size_t i = 0; i < m; ++i) {
    const std::complex<double> v = std::complex<double>(freq[i][0], freq[i][1]) * spectrum_[i];
    freq[i][0] = v.real();
    freq[i][1] = v.imag();
  }
  fftw_execute_dft_c2r(plans_->backward, freq.get(), real.get());
  return std::vector<double>(real.get(), real.get() + n);
}

VoxelGrid fft_convolve(const VoxelGrid& image, const Kernel& kernel) {
  if (kernel.type() == Kernel::Type::None) return image;
  const PeriodicConvolver convolver(image.geometry(), kernel);
  std::vector<double> out = convolver.apply(image.values());
  constexpr double slack = 1e-6;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double& v = out[i];
    if (v < -slack || v > 1.0 + slack)
      throw NumericalError(
          fmt::format("filtered value {} at index {} is outside [0, 1]; kernel not normalized?", v, i));
    v = std::clamp(v, 0.0, 1.0);
  }
  return VoxelGrid(image.geometry(), std::move(out), Depth::continuous());
}

ScalarField convolve(const ScalarField& field, const Kernel& kernel) {
  if (kernel.type() == Kernel::Type::None) return field;
  const PeriodicConvolver convolver(field.geometry, kernel);
  return {field.geometry, convolver.apply(field.values)};
}

}  // namespace minkvox
