#pragma once

#include <complex>
#include <cstddef>

namespace holotraj::kernels {

using cplx = std::complex<double>;

// Dense double-precision primitives behind the vector algebra and the LSTM
// inner loops. Two implementations exist: a scalar reference and an AVX2/FMA
// variant; the active one is picked at runtime from CPU features. The scalar
// kernels are the semantic ground truth; SIMD variants may reassociate sums
// and are equivalence-tested against the reference.
struct Ops {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double* x, double alpha, std::size_t n);
  // out = a + b
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  // out = a .* b
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  // y = M x, M row-major [rows x cols]
  void (*matvec)(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  // y = M^T x (y has cols entries, x has rows entries)
  void (*matvec_t)(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
  // M += x y^T (rank-1 update, x rows entries, y cols entries)
  void (*ger)(double* m, std::size_t rows, std::size_t cols, const double* x,
              const double* y);
  // out = a .* b over complex bins
  void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // acc += a .* b over complex bins
  void (*cmul_add)(cplx* acc, const cplx* a, const cplx* b, std::size_t n);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();

bool avx2_supported();
const Ops* avx2_ops_or_null();

// Active kernel table. Defaults to the best supported backend; the
// HOLOTRAJ_KERNELS environment variable ("scalar" / "avx2") or set_backend()
// override it. Selection happens once; reads are lock-free.
const Ops& active();
void set_backend(Backend b);
Backend active_backend();

}  // namespace holotraj::kernels
