#pragma once

#include <cstddef>

namespace okstab::simd {

/// Layout of a cell-centred field for the 5-point stencil. Missing
/// neighbours at rectangle walls mirror the cell itself (zero flux).
struct StencilShape {
  int nx = 0;
  int ny = 0;
  double cx = 0.0;  // 1/hx^2
  double cy = 0.0;  // 1/hy^2
  bool periodic = false;
};

/// Data-parallel inner loops used by the Poisson solver and the diffuse
/// flow. Every table computes the same quantities; `apply_laplacian`,
/// `axpy`, `xpay` and `double_well_force` are bit-identical across tables,
/// reductions agree to rounding.
struct KernelTable {
  const char* name;
  // out = -Lap_h(in)
  void (*apply_laplacian)(const double* in, double* out, const StencilShape& shape);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = x + a*y
  void (*xpay)(const double* x, double a, double* y, std::size_t n);
  // out = a*neg_lap + b*u*(u*u - 1) + c*v
  void (*double_well_force)(const double* u, const double* neg_lap, const double* v, double a,
                            double b, double c, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the build target has no AVX2 variant.
const KernelTable* avx2_kernels();
bool cpu_supports_avx2();

/// Table chosen once at first use: AVX2 when the CPU supports it, unless
/// the environment variable OKSTAB_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

}  // namespace okstab::simd
