#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace holotraj::hrr {

using cplx = std::complex<double>;

// D-dimensional real vector; the representational substrate. Atomic symbols
// live on the unit sphere, composites (superpositions) may not.
class HyperVector {
public:
  HyperVector() = default;
  explicit HyperVector(std::vector<double> values) : v_(std::move(values)) {}

  static HyperVector zeros(int dimension);
  // (1, 0, ..., 0): the unit of circular convolution.
  static HyperVector identity(int dimension);

  int dimension() const { return static_cast<int>(v_.size()); }
  std::span<const double> values() const { return v_; }
  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }

private:
  std::vector<double> v_;
};

// Half-complex DFT spectrum of a real vector (unnormalized, FFTW forward
// convention). Caching these amortizes repeated binding/power work.
struct Spectrum {
  int dimension = 0;
  std::vector<cplx> bins;  // dimension/2 + 1 entries

  std::size_t bin_count() const { return bins.size(); }
};

Spectrum spectrum_of(const HyperVector& v);

// Normalized inverse transform (divides by the dimension). The imaginary
// residue of the self-conjugate bins is dropped, i.e. this is the real part
// of the inverse DFT for spectra whose interior bins are conjugate-paired.
HyperVector from_spectrum(const Spectrum& s);

// A vector whose DFT coefficients all have magnitude one, so binding with it
// preserves norms. Stores per-bin phases for cheap fractional powers.
class UnitaryVector {
public:
  explicit UnitaryVector(HyperVector v);  // rejects non-unitary inputs

  const HyperVector& vector() const { return vec_; }
  int dimension() const { return vec_.dimension(); }
  std::span<const double> phases() const { return phases_; }
  std::span<const double> magnitudes() const { return mags_; }

private:
  HyperVector vec_;
  std::vector<double> phases_;
  std::vector<double> mags_;
};

/// Isotropic random vector normalized onto the unit sphere. Deterministic in
/// (dimension, seed) across platforms.
HyperVector random_unit(int dimension, std::uint64_t seed);

/// Random unitary vector: unit-magnitude spectrum with uniformly random
/// phases, conjugate-paired so the result is exactly real. DC bin is +1; for
/// even dimensions the Nyquist bin is a random sign.
UnitaryVector random_unitary(int dimension, std::uint64_t seed);

/// Circular convolution computed as IDFT(DFT(v) .* DFT(w)).
HyperVector bind(const HyperVector& v, const HyperVector& w);

/// Convolutive power: per-bin principal-branch exponentiation of the
/// spectrum, then the real part of the inverse transform. Restricted to
/// unitary bases so the spectrum magnitudes stay at one for any real p.
HyperVector power(const UnitaryVector& u, double exponent);

/// Component-wise sum; no normalization is applied.
HyperVector superpose(std::span<const HyperVector> vs);

/// Dot product.
double similarity(const HyperVector& v, const HyperVector& w);

double norm(const HyperVector& v);

HyperVector scaled(const HyperVector& v, double alpha);
void add_in_place(HyperVector& acc, const HyperVector& v);

}  // namespace holotraj::hrr
