// AVX2+FMA variants of the inner-loop kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; callers reach it through the runtime
// dispatch table in kernels.cpp.

#include "satqkd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace satqkd::kern {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// [w0 w0 w1 w1] from two consecutive weights, matching interleaved re/im lanes.
inline __m256d dup_weights(const double* w) {
  __m128d ww = _mm_loadu_pd(w);
  return _mm256_set_m128d(_mm_unpackhi_pd(ww, ww), _mm_unpacklo_pd(ww, ww));
}

void cmul_inplace_avx2(cplx* a, const cplx* b, std::size_t n) {
  auto* pa = reinterpret_cast<double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    __m256d bre = _mm256_movedup_pd(vb);
    __m256d bim = _mm256_permute_pd(vb, 0xF);
    __m256d aswap = _mm256_permute_pd(va, 0x5);
    // even: ar*br - ai*bi, odd: ai*br + ar*bi
    __m256d r = _mm256_fmaddsub_pd(va, bre, _mm256_mul_pd(aswap, bim));
    _mm256_storeu_pd(pa + 2 * i, r);
  }
  for (; i < n; ++i) a[i] *= b[i];
}

double power_sum_avx2(const cplx* a, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return s;
}

double weighted_power_sum_avx2(const cplx* a, const double* w, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vw = dup_weights(w + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(va, va), vw, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    s += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  }
  return s;
}

cplx weighted_overlap_avx2(const cplx* lo, const cplx* s, const double* w,
                           std::size_t n) {
  const auto* pl = reinterpret_cast<const double*>(lo);
  const auto* ps = reinterpret_cast<const double*>(s);
  // packed accumulators; per complex k: re_k = lr*sr + li*si, im_k = lr*si - li*sr
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vl = _mm256_loadu_pd(pl + 2 * i);
    __m256d vs = _mm256_loadu_pd(ps + 2 * i);
    __m256d vw = dup_weights(w + i);
    __m256d vlw = _mm256_mul_pd(vl, vw);
    acc_re = _mm256_fmadd_pd(vlw, vs, acc_re);  // [lr*sr, li*si, ...] * w
    __m256d lswap = _mm256_permute_pd(vlw, 0x5);  // [li, lr, ...] * w
    acc_im = _mm256_fmadd_pd(lswap, vs, acc_im);  // [li*sr, lr*si, ...] * w
  }
  // re: even + odd lanes of acc_re; im: odd - even lanes of acc_im
  alignas(32) double re4[4], im4[4];
  _mm256_store_pd(re4, acc_re);
  _mm256_store_pd(im4, acc_im);
  double re = re4[0] + re4[1] + re4[2] + re4[3];
  double im = (im4[1] - im4[0]) + (im4[3] - im4[2]);
  for (; i < n; ++i) {
    re += w[i] * (lo[i].real() * s[i].real() + lo[i].imag() * s[i].imag());
    im += w[i] * (lo[i].real() * s[i].imag() - lo[i].imag() * s[i].real());
  }
  return {re, im};
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

const Ops kAvx2Ops = {
    cmul_inplace_avx2, power_sum_avx2,     weighted_power_sum_avx2,
    weighted_overlap_avx2, dot_avx2,       axpy_avx2,
};

}  // namespace

const Ops* avx2_ops() {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2Ops : nullptr;
}

}  // namespace satqkd::kern

#else

namespace satqkd::kern {
const Ops* avx2_ops() { return nullptr; }
}  // namespace satqkd::kern

#endif
