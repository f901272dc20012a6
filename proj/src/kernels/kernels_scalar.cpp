#include "holotraj/kernels.hpp"

namespace holotraj::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void matvec_scalar(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

void matvec_t_scalar(const double* m, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    double xr = x[r];
    for (std::size_t c = 0; c < cols; ++c) y[c] += xr * row[c];
  }
}

void ger_scalar(double* m, std::size_t rows, std::size_t cols, const double* x,
                const double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = m + r * cols;
    double xr = x[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += xr * y[c];
  }
}

void cmul_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double re = a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    double im = a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    out[i] = cplx(re, im);
  }
}

void cmul_add_scalar(cplx* acc, const cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double re = a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    double im = a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    acc[i] += cplx(re, im);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",      dot_scalar,      axpy_scalar, scale_scalar,
      add_scalar,    hadamard_scalar, matvec_scalar, matvec_t_scalar,
      ger_scalar,    cmul_scalar,     cmul_add_scalar,
  };
  return ops;
}

}  // namespace holotraj::kernels
