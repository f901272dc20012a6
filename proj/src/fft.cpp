#include "holotraj/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include "holotraj/error.hpp"

namespace holotraj::fft {
namespace {

// FFTW plan creation is not thread-safe; execution with the new-array API is.
// Plans are cached per length, created with FFTW_ESTIMATE so planning is
// deterministic, and FFTW_UNALIGNED so any caller buffer is acceptable.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
  static std::map<std::size_t, PlanPair> cache;
  return cache;
}

const PlanPair& plans_for(std::size_t n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> re(n);
  std::vector<cplx> sp(bins(n));
  PlanPair p;
  p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                               reinterpret_cast<fftw_complex*>(sp.data()),
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                               reinterpret_cast<fftw_complex*>(sp.data()),
                               re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p.fwd || !p.inv)
    throw Error(ErrKind::invalid_dimension, "FFT planning failed for length " + std::to_string(n));
  return cache.emplace(n, p).first->second;
}

}  // namespace

void r2c(const double* in, cplx* out, std::size_t n) {
  if (n < 1) throw Error(ErrKind::invalid_dimension, "FFT length must be >= 1");
  const PlanPair& p = plans_for(n);
  // r2c preserves its input for 1d transforms, but the API wants non-const.
  fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void c2r(const cplx* in, double* out, std::size_t n) {
  if (n < 1) throw Error(ErrKind::invalid_dimension, "FFT length must be >= 1");
  const PlanPair& p = plans_for(n);
  // c2r destroys its input; work on a scratch copy.
  thread_local std::vector<cplx> scratch;
  scratch.assign(in, in + bins(n));
  scratch[0] = cplx(scratch[0].real(), 0.0);
  if (n % 2 == 0) scratch[n / 2] = cplx(scratch[n / 2].real(), 0.0);
  fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

}  // namespace holotraj::fft
