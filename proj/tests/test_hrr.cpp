#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "holotraj/error.hpp"
#include "holotraj/hrr.hpp"
#include "holotraj/rng.hpp"

using namespace holotraj;
using hrr::HyperVector;
using hrr::UnitaryVector;

namespace {

// Independent oracle: the O(D^2) circular-convolution sum.
HyperVector naive_convolution(const HyperVector& v, const HyperVector& w) {
  int d = v.dimension();
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      out[static_cast<std::size_t>(j)] +=
          v[k] * w[((j - k) % d + d) % d];
  return HyperVector(std::move(out));
}

double max_abs_diff(const HyperVector& a, const HyperVector& b) {
  double m = 0.0;
  for (int i = 0; i < a.dimension(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("bind equals the naive circular-convolution sum") {
  int pair = 0;
  for (int d : {2, 3, 4, 5, 7, 8, 12, 16, 31, 33, 64}) {
    for (int rep = 0; rep < 20; ++rep) {
      HyperVector v = hrr::random_unit(d, derive_seed(100, static_cast<std::uint64_t>(pair)));
      HyperVector w = hrr::random_unit(d, derive_seed(200, static_cast<std::uint64_t>(pair)));
      ++pair;
      CHECK(max_abs_diff(hrr::bind(v, w), naive_convolution(v, w)) < 1e-10);
    }
  }
}

TEST_CASE("bind identity and shift") {
  HyperVector v(std::vector<double>{1, 2, 3, 4});
  CHECK(max_abs_diff(hrr::bind(v, HyperVector::identity(4)), v) < 1e-10);

  HyperVector shift(std::vector<double>{0, 1, 0, 0});
  HyperVector expect(std::vector<double>{4, 1, 2, 3});
  CHECK(max_abs_diff(hrr::bind(v, shift), expect) < 1e-10);
  CHECK(max_abs_diff(naive_convolution(v, shift), expect) == 0.0);
}

TEST_CASE("bind is commutative, associative and distributes over superposition") {
  for (int rep = 0; rep < 10; ++rep) {
    auto s = static_cast<std::uint64_t>(rep);
    HyperVector a = hrr::random_unit(64, derive_seed(1, s));
    HyperVector b = hrr::random_unit(64, derive_seed(2, s));
    HyperVector c = hrr::random_unit(64, derive_seed(3, s));
    CHECK(max_abs_diff(hrr::bind(a, b), hrr::bind(b, a)) < 1e-10);
    CHECK(max_abs_diff(hrr::bind(hrr::bind(a, b), c), hrr::bind(a, hrr::bind(b, c))) < 1e-9);
    HyperVector bc = hrr::superpose(std::vector<HyperVector>{b, c});
    HyperVector lhs = hrr::bind(a, bc);
    HyperVector rhs =
        hrr::superpose(std::vector<HyperVector>{hrr::bind(a, b), hrr::bind(a, c)});
    CHECK(max_abs_diff(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("random_unit determinism, norm and cross-talk") {
  HyperVector a = hrr::random_unit(512, 12345);
  HyperVector b = hrr::random_unit(512, 12345);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(std::abs(hrr::norm(a) - 1.0) < 1e-9);

  // Monte-Carlo over 1000 independent pairs at D=512: dot products sit near
  // 1/sqrt(D) ~ 0.044 and never approach the 0.2 vocabulary screen.
  double sum_abs = 0.0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto s = static_cast<std::uint64_t>(i);
    HyperVector u = hrr::random_unit(512, derive_seed(7000, s));
    HyperVector v = hrr::random_unit(512, derive_seed(8000, s));
    double dot = std::abs(hrr::similarity(u, v));
    sum_abs += dot;
    worst = std::max(worst, dot);
  }
  double mean_abs = sum_abs / 1000.0;
  CHECK(mean_abs > 0.02);
  CHECK(mean_abs < 0.07);
  CHECK(worst < 0.2);
}

TEST_CASE("unitary vectors preserve norms and invert cleanly") {
  for (int d : {64, 128, 512, 129}) {
    for (int rep = 0; rep < (d == 512 ? 100 : 10); ++rep) {
      auto s = static_cast<std::uint64_t>(rep);
      UnitaryVector u = hrr::random_unitary(d, derive_seed(40, s));
      HyperVector v = hrr::random_unit(d, derive_seed(41, s));
      CHECK(std::abs(hrr::norm(hrr::bind(v, u.vector())) - hrr::norm(v)) < 1e-9);
    }
  }
  // u^1 (x) u^(-1) recovers the convolution identity
  UnitaryVector u = hrr::random_unitary(256, 777);
  HyperVector probe = hrr::bind(hrr::power(u, 1.0), hrr::power(u, -1.0));
  CHECK(std::abs(hrr::similarity(probe, HyperVector::identity(256)) - 1.0) < 1e-9);
}

TEST_CASE("all-ones spectrum is the identity vector") {
  hrr::Spectrum s;
  s.dimension = 4;
  s.bins = {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
  HyperVector v = hrr::from_spectrum(s);
  CHECK(max_abs_diff(v, HyperVector::identity(4)) < 1e-12);
  // and the identity is unitary with all phases zero
  UnitaryVector u(HyperVector::identity(4));
  for (double p : u.phases()) CHECK(std::abs(p) < 1e-12);
}

TEST_CASE("spectrum round trip") {
  for (int d : {2, 3, 16, 511, 512}) {
    HyperVector v = hrr::random_unit(d, static_cast<std::uint64_t>(d));
    CHECK(max_abs_diff(hrr::from_spectrum(hrr::spectrum_of(v)), v) < 1e-10);
  }
}

TEST_CASE("convolutive power laws") {
  UnitaryVector u = hrr::random_unitary(128, 31337);
  CHECK(max_abs_diff(hrr::power(u, 0.0), HyperVector::identity(128)) < 1e-10);
  CHECK(max_abs_diff(hrr::power(u, 1.0), u.vector()) < 1e-10);
  CHECK(max_abs_diff(hrr::power(u, 2.0), hrr::bind(u.vector(), u.vector())) < 1e-10);

  Rng rng(4242);
  for (int rep = 0; rep < 100; ++rep) {
    double a = rng.uniform(-5.0, 5.0);
    double b = rng.uniform(-5.0, 5.0);
    HyperVector lhs = hrr::power(u, a + b);
    HyperVector rhs = hrr::bind(hrr::power(u, a), hrr::power(u, b));
    CHECK(max_abs_diff(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("superpose") {
  HyperVector a = hrr::random_unit(64, 1);
  HyperVector b = hrr::random_unit(64, 2);
  CHECK(max_abs_diff(hrr::superpose(std::vector<HyperVector>{a}), a) == 0.0);

  HyperVector neg = hrr::scaled(a, -1.0);
  HyperVector zero = hrr::superpose(std::vector<HyperVector>{a, neg});
  CHECK(hrr::norm(zero) == 0.0);

  HyperVector ab = hrr::superpose(std::vector<HyperVector>{a, b});
  CHECK(hrr::similarity(ab, a) ==
        doctest::Approx(1.0 + hrr::similarity(b, a)).epsilon(1e-12));
}

TEST_CASE("similarity statistics at D=512") {
  double sum = 0.0, sum_sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    auto s = static_cast<std::uint64_t>(i);
    HyperVector u = hrr::random_unit(512, derive_seed(900, s));
    HyperVector v = hrr::random_unit(512, derive_seed(901, s));
    double d = hrr::similarity(u, v);
    sum += d;
    sum_sq += d * d;
  }
  double mean = sum / n;
  double std = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.002);                  // ~4 sigma of the mean estimator
  CHECK(std == doctest::Approx(1.0 / std::sqrt(512.0)).epsilon(0.05));

  HyperVector v = hrr::random_unit(512, 1);
  CHECK(std::abs(hrr::similarity(v, v) - 1.0) < 1e-9);
  CHECK(hrr::similarity(v, HyperVector::zeros(512)) == 0.0);
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(hrr::random_unit(1, 0), Error);
  CHECK_THROWS_AS(hrr::random_unitary(0, 0), Error);
  CHECK_THROWS_AS(hrr::bind(hrr::random_unit(4, 0), hrr::random_unit(8, 0)), Error);
  CHECK_THROWS_AS(hrr::similarity(hrr::random_unit(4, 0), hrr::random_unit(8, 0)), Error);
  CHECK_THROWS_AS(hrr::superpose(std::vector<HyperVector>{}), Error);
  CHECK_THROWS_AS(UnitaryVector(hrr::random_unit(64, 5)), Error);  // not unitary
  UnitaryVector u = hrr::random_unitary(16, 1);
  CHECK_THROWS_AS(hrr::power(u, std::nan("")), Error);

  try {
    hrr::random_unit(1, 0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::invalid_dimension);
  }
  try {
    UnitaryVector bad(hrr::random_unit(64, 5));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::non_unitary_base);
  }
}
