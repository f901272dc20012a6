#include "holotraj/hrr.hpp"

#include <cmath>

#include "holotraj/error.hpp"
#include "holotraj/fft.hpp"
#include "holotraj/kernels.hpp"
#include "holotraj/rng.hpp"

namespace holotraj::hrr {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_dimension(int dimension) {
  if (dimension < 2)
    throw Error(ErrKind::invalid_dimension,
                "vector dimension must be >= 2, got " + std::to_string(dimension));
}

void require_same_dimension(int a, int b) {
  if (a != b)
    throw Error(ErrKind::dimension_mismatch,
                "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

HyperVector HyperVector::zeros(int dimension) {
  require_dimension(dimension);
  return HyperVector(std::vector<double>(static_cast<std::size_t>(dimension), 0.0));
}

HyperVector HyperVector::identity(int dimension) {
  HyperVector v = zeros(dimension);
  v[0] = 1.0;
  return v;
}

Spectrum spectrum_of(const HyperVector& v) {
  require_dimension(v.dimension());
  Spectrum s;
  s.dimension = v.dimension();
  s.bins.resize(fft::bins(static_cast<std::size_t>(v.dimension())));
  fft::r2c(v.data(), s.bins.data(), static_cast<std::size_t>(v.dimension()));
  return s;
}

HyperVector from_spectrum(const Spectrum& s) {
  require_dimension(s.dimension);
  std::vector<double> out(static_cast<std::size_t>(s.dimension));
  fft::c2r(s.bins.data(), out.data(), static_cast<std::size_t>(s.dimension));
  kernels::active().scale(out.data(), 1.0 / s.dimension, out.size());
  return HyperVector(std::move(out));
}

UnitaryVector::UnitaryVector(HyperVector v) : vec_(std::move(v)) {
  Spectrum s = spectrum_of(vec_);
  phases_.resize(s.bin_count());
  mags_.resize(s.bin_count());
  for (std::size_t k = 0; k < s.bin_count(); ++k) {
    mags_[k] = std::abs(s.bins[k]);
    phases_[k] = std::atan2(s.bins[k].imag(), s.bins[k].real());
    if (std::abs(mags_[k] - 1.0) > 1e-9)
      throw Error(ErrKind::non_unitary_base,
                  "spectrum magnitude " + std::to_string(mags_[k]) + " at bin " +
                      std::to_string(k) + " is not 1");
  }
}

HyperVector random_unit(int dimension, std::uint64_t seed) {
  require_dimension(dimension);
  Rng rng = Rng::stream(seed, 0x756e6974ull);  // "unit"
  std::vector<double> v(static_cast<std::size_t>(dimension));
  for (double& x : v) x = rng.normal();
  double n = std::sqrt(kernels::active().dot(v.data(), v.data(), v.size()));
  while (n == 0.0) {  // astronomically unlikely; redraw
    for (double& x : v) x = rng.normal();
    n = std::sqrt(kernels::active().dot(v.data(), v.data(), v.size()));
  }
  kernels::active().scale(v.data(), 1.0 / n, v.size());
  return HyperVector(std::move(v));
}

UnitaryVector random_unitary(int dimension, std::uint64_t seed) {
  require_dimension(dimension);
  Rng rng = Rng::stream(seed, 0x756e7279ull);  // "unry"
  std::size_t n = static_cast<std::size_t>(dimension);
  Spectrum s;
  s.dimension = dimension;
  s.bins.resize(fft::bins(n));
  s.bins[0] = cplx(1.0, 0.0);
  bool even = (n % 2 == 0);
  std::size_t interior_end = even ? s.bin_count() - 1 : s.bin_count();
  for (std::size_t k = 1; k < interior_end; ++k) {
    double phase = rng.uniform(-kPi, kPi);
    s.bins[k] = cplx(std::cos(phase), std::sin(phase));
  }
  if (even) s.bins[s.bin_count() - 1] = cplx(rng.next_u64() & 1 ? 1.0 : -1.0, 0.0);
  return UnitaryVector(from_spectrum(s));
}

HyperVector bind(const HyperVector& v, const HyperVector& w) {
  require_same_dimension(v.dimension(), w.dimension());
  Spectrum sv = spectrum_of(v);
  Spectrum sw = spectrum_of(w);
  Spectrum out;
  out.dimension = v.dimension();
  out.bins.resize(sv.bin_count());
  kernels::active().cmul(sv.bins.data(), sw.bins.data(), out.bins.data(), sv.bin_count());
  return from_spectrum(out);
}

HyperVector power(const UnitaryVector& u, double exponent) {
  if (!std::isfinite(exponent))
    throw Error(ErrKind::invalid_exponent, "exponent must be finite");
  std::size_t n = static_cast<std::size_t>(u.dimension());
  Spectrum s;
  s.dimension = u.dimension();
  s.bins.resize(fft::bins(n));
  auto phases = u.phases();
  auto mags = u.magnitudes();
  bool even = (n % 2 == 0);
  for (std::size_t k = 0; k < s.bins.size(); ++k) {
    double r = std::pow(mags[k], exponent);
    double phi = exponent * phases[k];
    bool self_conjugate = (k == 0) || (even && k == s.bins.size() - 1);
    // Self-conjugate bins keep only the real part (the Re in the definition);
    // interior bins stay conjugate-paired automatically.
    s.bins[k] = self_conjugate ? cplx(r * std::cos(phi), 0.0)
                               : cplx(r * std::cos(phi), r * std::sin(phi));
  }
  return from_spectrum(s);
}

HyperVector superpose(std::span<const HyperVector> vs) {
  if (vs.empty()) throw Error(ErrKind::empty_input, "superpose of empty list");
  for (const auto& v : vs) require_same_dimension(vs[0].dimension(), v.dimension());
  HyperVector acc = vs[0];
  for (std::size_t i = 1; i < vs.size(); ++i)
    kernels::active().add(acc.data(), vs[i].data(), acc.data(),
                          static_cast<std::size_t>(acc.dimension()));
  return acc;
}

double similarity(const HyperVector& v, const HyperVector& w) {
  require_same_dimension(v.dimension(), w.dimension());
  return kernels::active().dot(v.data(), w.data(), static_cast<std::size_t>(v.dimension()));
}

double norm(const HyperVector& v) {
  return std::sqrt(kernels::active().dot(v.data(), v.data(),
                                         static_cast<std::size_t>(v.dimension())));
}

HyperVector scaled(const HyperVector& v, double alpha) {
  HyperVector out = v;
  kernels::active().scale(out.data(), alpha, static_cast<std::size_t>(out.dimension()));
  return out;
}

void add_in_place(HyperVector& acc, const HyperVector& v) {
  require_same_dimension(acc.dimension(), v.dimension());
  kernels::active().add(acc.data(), v.data(), acc.data(),
                        static_cast<std::size_t>(acc.dimension()));
}

}  // namespace holotraj::hrr
