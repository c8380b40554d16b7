#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "okstab/simd/kernels.hpp"

using namespace okstab::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("dispatch picks a table and honours the scalar override name") {
  const KernelTable& k = active_kernels();
  CHECK((std::string(k.name) == "scalar" || std::string(k.name) == "avx2"));
  CHECK(std::string(scalar_kernels().name) == "scalar");
  if (cpu_supports_avx2() && avx2_kernels()) CHECK(std::string(avx2_kernels()->name) == "avx2");
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const KernelTable* v = avx2_kernels();
  if (!v || !cpu_supports_avx2()) {
    MESSAGE("no AVX2 on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& s = scalar_kernels();
  for (int nx : {16, 17, 19, 33, 64}) {
    for (int ny : {16, 21}) {
      for (bool periodic : {false, true}) {
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        const StencilShape shape{nx, ny, 1.0 / 0.01, 1.0 / 0.0144, periodic};
        const auto in = random_vector(n, nx * 100 + ny);
        std::vector<double> a(n), b(n);
        s.apply_laplacian(in.data(), a.data(), shape);
        v->apply_laplacian(in.data(), b.data(), shape);
        CHECK(bitwise_equal(a, b));
      }
    }
  }
  for (std::size_t n : {1u, 3u, 4u, 5u, 31u, 1000u, 4099u}) {
    const auto x = random_vector(n, n);
    const auto y0 = random_vector(n, n + 7);
    const auto z = random_vector(n, n + 11);

    const double ds = s.dot(x.data(), y0.data(), n);
    const double dv = v->dot(x.data(), y0.data(), n);
    CHECK(dv == doctest::Approx(ds).epsilon(1e-12));
    CHECK(v->sum(x.data(), n) == doctest::Approx(s.sum(x.data(), n)).epsilon(1e-12).scale(static_cast<double>(n)));

    auto ya = y0, yb = y0;
    s.axpy(0.37, x.data(), ya.data(), n);
    v->axpy(0.37, x.data(), yb.data(), n);
    CHECK(bitwise_equal(ya, yb));

    ya = y0;
    yb = y0;
    s.xpay(x.data(), -1.3, ya.data(), n);
    v->xpay(x.data(), -1.3, yb.data(), n);
    CHECK(bitwise_equal(ya, yb));

    std::vector<double> fa(n), fb(n);
    s.double_well_force(x.data(), y0.data(), z.data(), 0.04, 200.0, 2.0, fa.data(), n);
    v->double_well_force(x.data(), y0.data(), z.data(), 0.04, 200.0, 2.0, fb.data(), n);
    CHECK(bitwise_equal(fa, fb));
  }
}

TEST_CASE("scalar laplacian of a linear field vanishes in the interior and feels the walls") {
  const int nx = 16, ny = 16;
  const double h = 1.0 / 16;
  std::vector<double> in(nx * ny), out(nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) in[j * nx + i] = (i + 0.5) * h;
  scalar_kernels().apply_laplacian(in.data(), out.data(), {nx, ny, 1 / (h * h), 1 / (h * h), false});
  CHECK(out[5 * nx + 7] == doctest::Approx(0.0).scale(1.0));
  // mirror ghost at x = 0 gives -(u1 - u0)/h^2
  CHECK(out[5 * nx] == doctest::Approx(-1.0 / h));
  CHECK(out[5 * nx + nx - 1] == doctest::Approx(1.0 / h));
}
