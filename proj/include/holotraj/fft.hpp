#pragma once

#include <complex>
#include <cstddef>

namespace holotraj::fft {

using cplx = std::complex<double>;

// Number of half-spectrum bins of a length-n real transform.
constexpr std::size_t bins(std::size_t n) { return n / 2 + 1; }

// Forward real-to-complex DFT, FFTW sign convention (exp(-2*pi*i*j*k/n)),
// unnormalized. `out` must hold bins(n) values.
void r2c(const double* in, cplx* out, std::size_t n);

// Inverse complex-to-real DFT, unnormalized (a r2c/c2r round trip scales by
// n). The imaginary parts of the DC bin and, for even n, the Nyquist bin are
// ignored, which is exactly "real part of the inverse transform" for inputs
// whose remaining bins are conjugate-paired. `in` is left untouched.
void c2r(const cplx* in, double* out, std::size_t n);

}  // namespace holotraj::fft
