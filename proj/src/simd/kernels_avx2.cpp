#include "okstab/simd/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define OKSTAB_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace okstab::simd {

#ifdef OKSTAB_HAVE_AVX2

namespace {

#define OKSTAB_AVX2 __attribute__((target("avx2")))

// Same operation order as the scalar reference so results match bit for bit;
// FMA is deliberately not enabled for this translation unit's kernels.
OKSTAB_AVX2 void laplacian_row(const double* row, const double* down, const double* up,
                               double* out, const StencilShape& s) {
  const int nx = s.nx;
  const __m256d cx = _mm256_set1_pd(s.cx);
  const __m256d cy = _mm256_set1_pd(s.cy);
  auto scalar_at = [&](int i) {
    const double c = row[i];
    const double l = i == 0 ? (s.periodic ? row[nx - 1] : c) : row[i - 1];
    const double r = i == nx - 1 ? (s.periodic ? row[0] : c) : row[i + 1];
    out[i] = s.cx * ((c - l) + (c - r)) + s.cy * ((c - down[i]) + (c - up[i]));
  };
  scalar_at(0);
  int i = 1;
  for (; i + 4 <= nx - 1; i += 4) {
    const __m256d c = _mm256_loadu_pd(row + i);
    const __m256d l = _mm256_loadu_pd(row + i - 1);
    const __m256d r = _mm256_loadu_pd(row + i + 1);
    const __m256d d = _mm256_loadu_pd(down + i);
    const __m256d u = _mm256_loadu_pd(up + i);
    const __m256d hx = _mm256_add_pd(_mm256_sub_pd(c, l), _mm256_sub_pd(c, r));
    const __m256d hy = _mm256_add_pd(_mm256_sub_pd(c, d), _mm256_sub_pd(c, u));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(cx, hx), _mm256_mul_pd(cy, hy)));
  }
  for (; i < nx; ++i) scalar_at(i);
}

OKSTAB_AVX2 void apply_laplacian(const double* in, double* out, const StencilShape& s) {
  const std::size_t nx = static_cast<std::size_t>(s.nx);
  for (int j = 0; j < s.ny; ++j) {
    const double* row = in + j * nx;
    const double* down = j > 0 ? row - nx : (s.periodic ? in + (s.ny - 1) * nx : row);
    const double* up = j + 1 < s.ny ? row + nx : (s.periodic ? in : row);
    laplacian_row(row, down, up, out + j * nx, s);
  }
}

OKSTAB_AVX2 double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

OKSTAB_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  double acc = horizontal_sum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

OKSTAB_AVX2 double sum(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  double acc = horizontal_sum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

OKSTAB_AVX2 void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

OKSTAB_AVX2 void xpay(const double* x, double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(va, vy)));
  }
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

OKSTAB_AVX2 void double_well_force(const double* u, const double* neg_lap, const double* v, double a,
                                   double b, double c, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ui = _mm256_loadu_pd(u + i);
    const __m256d well = _mm256_mul_pd(ui, _mm256_sub_pd(_mm256_mul_pd(ui, ui), one));
    const __m256d lin = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(neg_lap + i)),
                                      _mm256_mul_pd(vb, well));
    _mm256_storeu_pd(out + i, _mm256_add_pd(lin, _mm256_mul_pd(vc, _mm256_loadu_pd(v + i))));
  }
  for (; i < n; ++i) {
    const double ui = u[i];
    out[i] = (a * neg_lap[i] + b * (ui * (ui * ui - 1.0))) + c * v[i];
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", apply_laplacian, dot, sum, axpy, xpay, double_well_force};
  return &table;
}

bool cpu_supports_avx2() { return __builtin_cpu_supports("avx2"); }

#else

const KernelTable* avx2_kernels() { return nullptr; }
bool cpu_supports_avx2() { return false; }

#endif

}  // namespace okstab::simd
