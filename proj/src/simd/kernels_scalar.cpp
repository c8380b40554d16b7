#include "okstab/simd/kernels.hpp"

namespace okstab::simd {

namespace {

void laplacian_row(const double* row, const double* down, const double* up, double* out,
                   const StencilShape& s) {
  const int nx = s.nx;
  for (int i = 0; i < nx; ++i) {
    const double c = row[i];
    double l;
    double r;
    if (i == 0) {
      l = s.periodic ? row[nx - 1] : c;
    } else {
      l = row[i - 1];
    }
    if (i == nx - 1) {
      r = s.periodic ? row[0] : c;
    } else {
      r = row[i + 1];
    }
    out[i] = s.cx * ((c - l) + (c - r)) + s.cy * ((c - down[i]) + (c - up[i]));
  }
}

void apply_laplacian(const double* in, double* out, const StencilShape& s) {
  const std::size_t nx = static_cast<std::size_t>(s.nx);
  for (int j = 0; j < s.ny; ++j) {
    const double* row = in + j * nx;
    const double* down = j > 0 ? row - nx : (s.periodic ? in + (s.ny - 1) * nx : row);
    const double* up = j + 1 < s.ny ? row + nx : (s.periodic ? in : row);
    laplacian_row(row, down, up, out + j * nx, s);
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void double_well_force(const double* u, const double* neg_lap, const double* v, double a, double b,
                       double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    out[i] = (a * neg_lap[i] + b * (ui * (ui * ui - 1.0))) + c * v[i];
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", apply_laplacian, dot, sum, axpy, xpay, double_well_force};
  return table;
}

}  // namespace okstab::simd
