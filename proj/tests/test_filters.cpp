#include <doctest.h>

#include <cmath>
#include <map>

#include "minkvox/error.hpp"
#include "minkvox/filters.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace minkvox;

namespace {

double kernel_mass(const ScalarField& k) {
  double s = 0.0;
  for (double v : k.values) s += v;
  return s * k.geometry.voxel_volume();
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("kernel construction and names") {
  CHECK_THROWS_AS(Kernel::gaussian(0.0), InvalidArgument);
  CHECK_THROWS_AS(Kernel::ball(-1.0), InvalidArgument);
  CHECK_THROWS_AS(Kernel::from_name("box", 1.0), InvalidArgument);
  CHECK(Kernel::from_name("none", 5.0) == Kernel::none());
  CHECK(Kernel::from_name("ball", 1.2) == Kernel::ball(1.2));
  CHECK(Kernel::gaussian(2.0).support_radius() == 6.0);
  CHECK(Kernel::ball(1.2).support_radius() == 1.2);
}

TEST_CASE("gaussian kernel integrates to one") {
  for (double sigma : {0.5, 1.0, 1.7, 2.5})
    for (double h : {0.3, 1.0, 2.0}) {
      const ScalarField k = sample_kernel(Kernel::gaussian(sigma), Geometry(Dims{16, 17, 18}, h));
      CHECK(kernel_mass(k) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ball kernel sigma 1.2 lives on the offsets of norm <= 1.2") {
  const Geometry geo(Dims{32, 32, 32}, 1.0);
  const ScalarField k = sample_kernel(Kernel::ball(1.2), geo);
  std::size_t nonzero = 0;
  double value = 0.0;
  for (std::ptrdiff_t z = -16; z < 16; ++z)
    for (std::ptrdiff_t y = -16; y < 16; ++y)
      for (std::ptrdiff_t x = -16; x < 16; ++x) {
        const double v = k.values[geo.wrapped_index(x, y, z)];
        const bool inside = static_cast<double>(x * x + y * y + z * z) <= 1.44;
        REQUIRE((v != 0.0) == inside);
        if (inside) {
          if (nonzero == 0) value = v;
          REQUIRE(v == value);
          ++nonzero;
        }
      }
  CHECK(nonzero == 7);
  CHECK(kernel_mass(k) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ball kernel narrower than a voxel is the identity tap") {
  const ScalarField k = sample_kernel(Kernel::ball(0.4), Geometry(Dims{8, 8, 8}, 1.0));
  CHECK(k.values[0] == 1.0);
  for (std::size_t i = 1; i < k.values.size(); ++i) REQUIRE(k.values[i] == 0.0);
}

TEST_CASE("sampled kernels match the enumeration oracle") {
  for (auto [kind, sigma] : {std::pair{'b', 2.3}, std::pair{'g', 1.1}, std::pair{'b', 3.0}}) {
    const double h = 0.7;
    const Geometry geo(Dims{20, 21, 22}, h);
    const Kernel kernel = kind == 'b' ? Kernel::ball(sigma) : Kernel::gaussian(sigma);
    const ScalarField k = sample_kernel(kernel, geo);
    std::vector<double> expect(geo.count(), 0.0);
    for (const oracle::Tap& t : oracle::kernel_taps(kind, sigma, h))
      expect[geo.wrapped_index(t.offset[0], t.offset[1], t.offset[2])] = t.weight;
    for (std::size_t i = 0; i < expect.size(); ++i)
      REQUIRE(k.values[i] == doctest::Approx(expect[i]).epsilon(1e-13));
  }
}

TEST_CASE("sampled kernels are invariant under the 48 cube symmetries") {
  const Geometry geo(Dims{16, 16, 16}, 1.0);
  for (const Kernel& kernel : {Kernel::ball(2.7), Kernel::gaussian(1.3)}) {
    const ScalarField k = sample_kernel(kernel, geo);
    for (const oracle::CubeSymmetry& s : oracle::cube_group())
      for (std::ptrdiff_t z = -8; z < 8; ++z)
        for (std::ptrdiff_t y = -8; y < 8; ++y)
          for (std::ptrdiff_t x = -8; x < 8; ++x) {
            const std::array<std::ptrdiff_t, 3> o{x, y, z};
            const double a = k.values[geo.wrapped_index(x, y, z)];
            const double b = k.values[geo.wrapped_index(s.sign[0] * o[s.perm[0]], s.sign[1] * o[s.perm[1]],
                                                        s.sign[2] * o[s.perm[2]])];
            REQUIRE(a == b);
          }
  }
}

TEST_CASE("kernel support must fit in half the box") {
  CHECK_THROWS_AS(sample_kernel(Kernel::gaussian(2.0), Geometry(Dims{12, 40, 40}, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(sample_kernel(Kernel::ball(4.0), Geometry(Dims{8, 40, 40}, 1.0)), InvalidArgument);
  CHECK_NOTHROW(sample_kernel(Kernel::ball(3.9), Geometry(Dims{8, 8, 8}, 1.0)));
  CHECK_THROWS_AS(sample_kernel(Kernel::none(), Geometry(Dims{8, 8, 8}, 1.0)), InvalidArgument);
  const VoxelGrid g = VoxelGrid::filled(Geometry(Dims{8, 8, 8}, 1.0), 0.5);
  CHECK_THROWS_AS(fft_convolve(g, Kernel::gaussian(2.0)), InvalidArgument);
}

TEST_CASE("fft convolution equals the direct periodic sum") {
  gen::Source src(3);
  for (auto [kind, sigma] : {std::pair{'b', 1.2}, std::pair{'g', 1.0}, std::pair{'b', 2.2}}) {
    const Dims d{11, 12, 9};
    const double h = 0.5;
    const VoxelGrid g = src.gray_grid(d, h, 2);
    const Kernel kernel = kind == 'b' ? Kernel::ball(sigma) : Kernel::gaussian(sigma);
    const VoxelGrid fast = fft_convolve(g, kernel);
    const std::vector<double> slow =
        oracle::convolve({g.values().begin(), g.values().end()}, d, oracle::kernel_taps(kind, sigma, h), h);
    CHECK(max_abs_diff(fast.values(), slow) < 1e-12);
    CHECK(fast.depth().is_continuous());
  }
}

TEST_CASE("constant image stays constant") {
  const Geometry geo(Dims{10, 12, 14}, 0.8);
  for (double c : {0.0, 0.3, 1.0})
    for (const Kernel& k : {Kernel::ball(1.2), Kernel::gaussian(1.5), Kernel::none()}) {
      const VoxelGrid out = fft_convolve(VoxelGrid::filled(geo, c), k);
      for (double v : out.values()) REQUIRE(std::abs(v - c) < 1e-12);
    }
}

TEST_CASE("kernel None is the identity") {
  gen::Source src(8);
  const VoxelGrid g = src.gray_grid(Dims{5, 6, 7}, 1.0, 3);
  const VoxelGrid out = fft_convolve(g, Kernel::none());
  CHECK(std::equal(g.values().begin(), g.values().end(), out.values().begin()));
  CHECK(out.depth() == g.depth());
}

TEST_CASE("ball filter on a laminate matches the plane-count profile") {
  // Across a flat interface the filtered value is the fraction of kernel taps
  // on the solid side, so profile steps equal the tap counts per lattice plane.
  for (double sigma : {1.2, 2.5, 4.3}) {
    const Dims d{40, 16, 16};
    const VoxelGrid lam = voxelize(Shape{Laminate{0, {{0.0, 20.0}}}}, d, 1.0, 1);
    const VoxelGrid f = fft_convolve(lam, Kernel::ball(sigma));
    std::map<std::ptrdiff_t, double> plane;
    double total = 0.0;
    for (const oracle::Tap& t : oracle::kernel_taps('b', sigma, 1.0)) {
      plane[t.offset[0]] += 1.0;
      total += 1.0;
    }
    for (std::size_t x = 10; x < 30; ++x) {
      // f(x) - f(x + 1) is the weight of the plane that crosses the interface.
      const double step = f(x, 3, 5) - f(x + 1, 3, 5);
      const auto k = static_cast<std::ptrdiff_t>(x) - 19;
      const double expect = plane.count(k) ? plane[k] / total : 0.0;
      REQUIRE(std::abs(step - expect) < 1e-12);
    }
  }
}

TEST_CASE("ball filter on a laminate ramps from 0 to 1 over the kernel diameter") {
  // Secant slope across [-h sigma, h sigma] is 1 / (2 h sigma). The 3D profile is
  // a cubic, not a line, so the slope at the interface itself is steeper.
  for (double sigma : {4.3, 6.2}) {
    const double h = 0.5;
    const Dims d{48, 16, 16};
    const VoxelGrid lam = voxelize(Shape{Laminate{0, {{0.0, 12.0}}}}, d, h, 1);
    const VoxelGrid f = fft_convolve(lam, Kernel::ball(sigma));
    std::vector<double> xs, fs;
    for (std::size_t x = 8; x < 40; ++x) {
      xs.push_back((static_cast<double>(x) + 0.5) * h);
      fs.push_back(f(x, 0, 0));
    }
    auto interp = [&](double x) {
      for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (x >= xs[i] && x <= xs[i + 1]) return fs[i] + (fs[i + 1] - fs[i]) * (x - xs[i]) / (xs[i + 1] - xs[i]);
      FAIL("outside profile");
      return 0.0;
    };
    const double r = h * sigma;
    const double secant = std::abs(interp(12.0 + r) - interp(12.0 - r)) / (2.0 * r);
    CHECK(std::abs(secant * 2.0 * r - 1.0) < 0.02);
  }
}

TEST_CASE("filtering preserves the mean") {
  gen::Source src(21);
  for (int trial = 0; trial < 10; ++trial) {
    const VoxelGrid g = src.gray_grid(src.dims(8, 14), src.uniform(0.2, 2.0), src.integer(1, 3));
    const Kernel k = src.coin() ? Kernel::ball(src.uniform(0.5, 3.5)) : Kernel::gaussian(src.uniform(0.3, 1.2));
    CHECK(std::abs(fft_convolve(g, k).mean() - g.mean()) < 1e-12);
  }
}

TEST_CASE("filtering commutes with periodic shifts") {
  gen::Source src(22);
  for (int trial = 0; trial < 10; ++trial) {
    const VoxelGrid g = src.gray_grid(src.dims(8, 12), 1.0, 2);
    const Offset3 d = src.offset(20);
    const Kernel k = Kernel::ball(src.uniform(0.8, 3.0));
    const VoxelGrid a = fft_convolve(shift(g, d), k);
    const VoxelGrid b = shift(fft_convolve(g, k), d);
    CHECK(max_abs_diff(a.values(), b.values()) < 1e-12);
  }
}

TEST_CASE("filtering preserves a 90 degree rotation symmetry") {
  // Image invariant under (x, y) -> (y, n - 1 - x).
  const std::size_t n = 12;
  const Geometry geo(Dims{n, n, 10}, 1.0);
  gen::Source src(23);
  std::vector<double> v(geo.count(), 0.0);
  for (std::size_t z = 0; z < 10; ++z)
    for (std::size_t y = 0; y < n / 2; ++y)
      for (std::size_t x = 0; x < n / 2; ++x) {
        const double c = src.coin(0.4) ? 1.0 : 0.0;
        std::size_t px = x, py = y;
        for (int r = 0; r < 4; ++r) {
          v[geo.index(px, py, z)] = c;
          const std::size_t nx = py, ny = n - 1 - px;
          px = nx;
          py = ny;
        }
      }
  const VoxelGrid g(geo, v, Depth::levels(1));
  for (const Kernel& k : {Kernel::ball(2.4), Kernel::gaussian(1.1)}) {
    const VoxelGrid f = fft_convolve(g, k);
    for (std::size_t z = 0; z < 10; ++z)
      for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) REQUIRE(std::abs(f(x, y, z) - f(y, n - 1 - x, z)) < 1e-12);
  }
}

TEST_CASE("unconstrained fields are convolved without clamping") {
  const Geometry geo(Dims{8, 8, 8}, 1.0);
  std::vector<double> v(geo.count(), 0.0);
  v[0] = -5.0;
  v[9] = 7.0;
  const ScalarField out = convolve(ScalarField{geo, v}, Kernel::ball(1.2));
  double sum = 0.0, lo = 0.0;
  for (double x : out.values) {
    sum += x;
    lo = std::min(lo, x);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lo < -0.5);
}
