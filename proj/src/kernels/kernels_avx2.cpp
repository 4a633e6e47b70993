#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "kernel_table.hpp"

namespace qrs::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double acc = hsum(acc0);
  for (; i < n; ++i) acc += a[i];
  return acc;
}

double nrm2sq_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d v0 = _mm256_loadu_pd(a + i);
    __m256d v1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(a + i);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double max_abs_avx2(const double* a, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, _mm256_andnot_pd(signmask, _mm256_loadu_pd(a + i)));
  __m128d lo = _mm256_castpd256_pd128(m);
  __m128d hi = _mm256_extractf128_pd(m, 1);
  lo = _mm_max_pd(lo, hi);
  double r = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) r = std::max(r, std::fabs(a[i]));
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

inline __m256d soft_threshold_lane(__m256d vx, __m256d vt, __m256d signmask,
                                   __m256d zero) {
  __m256d mag = _mm256_sub_pd(_mm256_andnot_pd(signmask, vx), vt);
  __m256d pos = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
  __m256d res = _mm256_or_pd(_mm256_max_pd(mag, zero), _mm256_and_pd(vx, signmask));
  return _mm256_and_pd(res, pos);  // +0 where fully thresholded
}

void soft_threshold_avx2(const double* x, double t, double* out, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     soft_threshold_lane(_mm256_loadu_pd(x + i), vt, signmask, zero));
  for (; i < n; ++i) {
    const double m = std::fabs(x[i]) - t;
    out[i] = m > 0.0 ? (x[i] > 0.0 ? m : -m) : 0.0;
  }
}

void soft_threshold_vec_avx2(const double* x, const double* t, double* out,
                             std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     soft_threshold_lane(_mm256_loadu_pd(x + i),
                                         _mm256_loadu_pd(t + i), signmask, zero));
  for (; i < n; ++i) {
    const double m = std::fabs(x[i]) - t[i];
    out[i] = m > 0.0 ? (x[i] > 0.0 ? m : -m) : 0.0;
  }
}

void pinball_prox_avx2(const double* v, double lo, double hi, double* out,
                       std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(v + i);
    __m256d ge = _mm256_cmp_pd(x, vhi, _CMP_GE_OQ);
    __m256d le = _mm256_cmp_pd(x, vlo, _CMP_LE_OQ);
    __m256d r = _mm256_or_pd(_mm256_and_pd(ge, _mm256_sub_pd(x, vhi)),
                             _mm256_and_pd(le, _mm256_sub_pd(x, vlo)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) {
    if (v[i] >= hi)
      out[i] = v[i] - hi;
    else if (v[i] <= lo)
      out[i] = v[i] - lo;
    else
      out[i] = 0.0;
  }
}

}  // namespace

const Table& avx2_table() {
  static const Table table = {
      dot_avx2,           sum_avx2,
      nrm2sq_avx2,        max_abs_avx2,
      axpy_avx2,          soft_threshold_avx2,
      soft_threshold_vec_avx2, pinball_prox_avx2,
  };
  return table;
}

}  // namespace qrs::kernels::detail
