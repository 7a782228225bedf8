// AVX2+FMA variants of the flat-array kernels. This translation unit is
// compiled with -mavx2 -mfma and only ever dispatched to after a runtime
// CPU check.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "qsel/kernels.hpp"

namespace qsel::kernels {

namespace {

// Cephes-style exp reduction: exp(x) = 2^n * expm(r), |r| <= log(2)/2.
constexpr double kExpC1 = 6.93145751953125e-1;
constexpr double kExpC2 = 1.42860682030941723212e-6;
constexpr double kLog2E = 1.4426950408889634073599;
constexpr double kExpP0 = 1.26177193074810590878e-4;
constexpr double kExpP1 = 3.02994407707441961300e-2;
constexpr double kExpP2 = 9.99999999999999999910e-1;
constexpr double kExpQ0 = 3.00198505138664455042e-6;
constexpr double kExpQ1 = 2.52448340349684104192e-3;
constexpr double kExpQ2 = 2.27265548208155028766e-1;
constexpr double kExpQ3 = 2.00000000000000000005e0;
constexpr double kExpLo = -708.39641853226408;  // below: underflow to 0
constexpr double kExpHi = 709.78271289338397;   // above: overflow to inf

inline double cephes_exp(double x) {
  if (x < kExpLo) return 0.0;
  if (x > kExpHi) return HUGE_VAL;
  double n = std::floor(kLog2E * x + 0.5);
  x -= n * kExpC1;
  x -= n * kExpC2;
  const double xx = x * x;
  const double px = x * ((kExpP0 * xx + kExpP1) * xx + kExpP2);
  const double qx = ((kExpQ0 * xx + kExpQ1) * xx + kExpQ2) * xx + kExpQ3;
  double r = 1.0 + 2.0 * px / (qx - px);
  // 2^n by exponent adjustment; n stays within the normal range here.
  const long long bits = static_cast<long long>(n) << 52;
  double scale;
  long long rbits;
  __builtin_memcpy(&rbits, &r, 8);
  rbits += bits;
  __builtin_memcpy(&scale, &rbits, 8);
  return scale;
}

inline __m256d exp4(__m256d x) {
  const __m256d lo = _mm256_set1_pd(kExpLo);
  const __m256d hi = _mm256_set1_pd(kExpHi);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n =
      _mm256_floor_pd(_mm256_fmadd_pd(x, _mm256_set1_pd(kLog2E), _mm256_set1_pd(0.5)));
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(kExpC1), x);
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(kExpC2), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(kExpP0), xx, _mm256_set1_pd(kExpP1));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(kExpP2));
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(kExpQ0), xx, _mm256_set1_pd(kExpQ1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(kExpQ2));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(kExpQ3));
  const __m256d ratio = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  __m256d r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), ratio, _mm256_set1_pd(1.0));

  // Scale by 2^n through the exponent bits.
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i rbits = _mm256_add_epi64(_mm256_castpd_si256(r), _mm256_slli_epi64(n64, 52));
  r = _mm256_castsi256_pd(rbits);

  r = _mm256_andnot_pd(under, r);
  r = _mm256_blendv_pd(r, _mm256_set1_pd(HUGE_VAL), over);
  return r;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double sqdist_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    r += d * d;
  }
  return r;
}

void rowmax_update_avx2(double* best, const double* col, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(best + i, _mm256_max_pd(_mm256_loadu_pd(best + i), _mm256_loadu_pd(col + i)));
  }
  for (; i < n; ++i) {
    if (col[i] > best[i]) best[i] = col[i];
  }
}

void argmax_update_avx2(double* best, std::int32_t* arg, const double* col, std::int32_t k,
                        std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d b = _mm256_loadu_pd(best + i);
    const __m256d c = _mm256_loadu_pd(col + i);
    const __m256d gt = _mm256_cmp_pd(c, b, _CMP_GT_OQ);
    const int mask = _mm256_movemask_pd(gt);
    if (mask) {
      _mm256_storeu_pd(best + i, _mm256_blendv_pd(b, c, gt));
      if (mask & 1) arg[i] = k;
      if (mask & 2) arg[i + 1] = k;
      if (mask & 4) arg[i + 2] = k;
      if (mask & 8) arg[i + 3] = k;
    }
  }
  for (; i < n; ++i) {
    if (col[i] > best[i]) {
      best[i] = col[i];
      arg[i] = k;
    }
  }
}

void exp_diff_accum_avx2(double* acc, const double* x, const double* m, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(m + i)));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), e));
  }
  for (; i < n; ++i) acc[i] += cephes_exp(x[i] - m[i]);
}

void exp_diff_mul_accum_avx2(double* acc, const double* x, const double* m, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xs = _mm256_loadu_pd(x + i);
    const __m256d e = exp4(_mm256_sub_pd(xs, _mm256_loadu_pd(m + i)));
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(e, xs, _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] += cephes_exp(x[i] - m[i]) * x[i];
}

void exp_diff_store_avx2(double* out, const double* x, const double* m, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(m + i))));
  }
  for (; i < n; ++i) out[i] = cephes_exp(x[i] - m[i]);
}

void divide_inplace_avx2(double* x, const double* d, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_div_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(d + i)));
  }
  for (; i < n; ++i) x[i] /= d[i];
}

double ratio_sum_avx2(const double* num, const double* den, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i)));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += num[i] / den[i];
  return r;
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops = {
      sum_avx2,
      sqdist_avx2,
      rowmax_update_avx2,
      argmax_update_avx2,
      exp_diff_accum_avx2,
      exp_diff_mul_accum_avx2,
      exp_diff_store_avx2,
      divide_inplace_avx2,
      ratio_sum_avx2,
  };
  return &ops;
}

}  // namespace qsel::kernels

#else

#include "qsel/kernels.hpp"

namespace qsel::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace qsel::kernels

#endif
