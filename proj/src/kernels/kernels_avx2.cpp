// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma on x86-64 only; the
// dispatcher never hands these out unless the CPU reports both features.

#include "holotraj/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace holotraj::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
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

void scale_avx2(double* x, double alpha, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= alpha;
}

void add_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void matvec_avx2(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(m + r * cols, x, cols);
}

void matvec_t_avx2(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(x[r], m + r * cols, y, cols);
}

void ger_avx2(double* m, std::size_t rows, std::size_t cols, const double* x,
              const double* y) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(x[r], y, m + r * cols, cols);
}

// Complex multiply over interleaved (re, im) pairs, two complex values per
// 256-bit lane.
inline __m256d cmul_lane(__m256d va, __m256d vb) {
  __m256d re = _mm256_movedup_pd(va);          // [ar0 ar0 ar1 ar1]
  __m256d im = _mm256_permute_pd(va, 0xF);     // [ai0 ai0 ai1 ai1]
  __m256d swb = _mm256_permute_pd(vb, 0x5);    // [bi0 br0 bi1 br1]
  return _mm256_addsub_pd(_mm256_mul_pd(re, vb), _mm256_mul_pd(im, swb));
}

void cmul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = cmul_lane(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
    _mm256_storeu_pd(po + 2 * i, v);
  }
  for (; i < n; ++i) {
    double re = a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    double im = a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    out[i] = cplx(re, im);
  }
}

void cmul_add_avx2(cplx* acc, const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* pc = reinterpret_cast<double*>(acc);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = cmul_lane(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
    _mm256_storeu_pd(pc + 2 * i, _mm256_add_pd(_mm256_loadu_pd(pc + 2 * i), v));
  }
  for (; i < n; ++i) {
    double re = a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    double im = a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    acc[i] += cplx(re, im);
  }
}

}  // namespace

const Ops* avx2_ops_or_null() {
  static const Ops ops = {
      "avx2",      dot_avx2,      axpy_avx2, scale_avx2,
      add_avx2,    hadamard_avx2, matvec_avx2, matvec_t_avx2,
      ger_avx2,    cmul_avx2,     cmul_add_avx2,
  };
  return &ops;
}

}  // namespace holotraj::kernels

#else

namespace holotraj::kernels {
const Ops* avx2_ops_or_null() { return nullptr; }
}  // namespace holotraj::kernels

#endif
