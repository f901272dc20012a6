#include "holotraj/scene.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "holotraj/error.hpp"
#include "holotraj/kernels.hpp"
#include "holotraj/rng.hpp"
#include "holotraj/util.hpp"

namespace holotraj::scene {
namespace {

using hrr::cplx;
using hrr::Spectrum;

constexpr std::uint64_t kAtomStream[7] = {1, 2, 3, 4, 5, 6, 7};
constexpr const char* kAtomNames[7] = {"TYPE_car",    "TYPE_truck", "TYPE_motorcycle",
                                       "TARGET",      "EGO",        "X",
                                       "Y"};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw Error(ErrKind::malformed_snapshot, std::string("non-finite ") + what);
}

void check_snapshot(const SceneSnapshot& s) {
  require_finite(s.target.x, "target x");
  require_finite(s.target.y, "target y");
  for (const auto& o : s.others) {
    require_finite(o.x, "object x");
    require_finite(o.y, "object y");
  }
  if (s.ego) {
    require_finite((*s.ego)[0], "ego x");
    require_finite((*s.ego)[1], "ego y");
  }
}

void check_radius_scale(double radius, double scale) {
  if (!(radius > 0.0)) throw Error(ErrKind::config, "radius must be > 0");
  if (!(scale > 0.0)) throw Error(ErrKind::config, "scale must be > 0");
}

// Others within the radius, in the deterministic summation order.
std::vector<SceneObject> nearby_sorted(const SceneSnapshot& s, double radius) {
  std::vector<SceneObject> sel;
  for (const auto& o : s.others) {
    double d = std::hypot(o.x - s.target.x, o.y - s.target.y);
    if (d <= radius) sel.push_back(o);
  }
  std::sort(sel.begin(), sel.end(), [](const SceneObject& a, const SceneObject& b) {
    if (a.id != b.id) return a.id < b.id;
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return static_cast<int>(a.type) < static_cast<int>(b.type);
  });
  return sel;
}

// Spectrum of X^a (x) Y^b. Interior bins get the full phase rotation; the
// self-conjugate bins multiply the real parts the individual powers would
// produce, matching an op-by-op bind/power composition.
void position_rotation(const Vocabulary& vocab, double a, double b,
                       std::vector<cplx>& out) {
  auto px = vocab.axis_x().phases();
  auto py = vocab.axis_y().phases();
  std::size_t n = px.size();
  out.resize(n);
  bool even = (vocab.dimension() % 2 == 0);
  std::size_t lo = 1, hi = even ? n - 1 : n;
  out[0] = cplx(1.0, 0.0);
  for (std::size_t k = lo; k < hi; ++k) {
    double phi = a * px[k] + b * py[k];
    out[k] = cplx(std::cos(phi), std::sin(phi));
  }
  if (even) out[n - 1] = cplx(std::cos(a * px[n - 1]) * std::cos(b * py[n - 1]), 0.0);
}

// x * spec(X) + y * spec(Y), the scalar-multiplication position term.
void position_linear(const Vocabulary& vocab, double x, double y,
                     std::vector<cplx>& out) {
  const Spectrum& sx = vocab.axis_x_spectrum();
  const Spectrum& sy = vocab.axis_y_spectrum();
  out.resize(sx.bin_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = x * sx.bins[k] + y * sy.bins[k];
}

}  // namespace

const char* type_name(ObjectType t) {
  switch (t) {
    case ObjectType::car: return "car";
    case ObjectType::truck: return "truck";
    case ObjectType::motorcycle: return "motorcycle";
  }
  return "car";
}

std::optional<ObjectType> type_from_name(const std::string& name) {
  if (name == "car") return ObjectType::car;
  if (name == "truck") return ObjectType::truck;
  if (name == "motorcycle") return ObjectType::motorcycle;
  return std::nullopt;
}

const char* variant_name(EncodingVariant v) {
  switch (v) {
    case EncodingVariant::power: return "power";
    case EncodingVariant::scalar: return "scalar";
    case EncodingVariant::power_ego: return "power_ego";
  }
  return "power";
}

Vocabulary::Vocabulary(int dimension, std::uint64_t seed)
    : dimension_(dimension),
      seed_(seed),
      types_{hrr::random_unit(dimension, derive_seed(seed, kAtomStream[0])),
             hrr::random_unit(dimension, derive_seed(seed, kAtomStream[1])),
             hrr::random_unit(dimension, derive_seed(seed, kAtomStream[2]))},
      target_(hrr::random_unit(dimension, derive_seed(seed, kAtomStream[3]))),
      ego_(hrr::random_unit(dimension, derive_seed(seed, kAtomStream[4]))),
      axis_x_(hrr::random_unitary(dimension, derive_seed(seed, kAtomStream[5]))),
      axis_y_(hrr::random_unitary(dimension, derive_seed(seed, kAtomStream[6]))) {
  for (int t = 0; t < 3; ++t) spec_types_[static_cast<std::size_t>(t)] = hrr::spectrum_of(types_[static_cast<std::size_t>(t)]);
  spec_target_ = hrr::spectrum_of(target_);
  spec_ego_ = hrr::spectrum_of(ego_);
  spec_axis_x_ = hrr::spectrum_of(axis_x_.vector());
  spec_axis_y_ = hrr::spectrum_of(axis_y_.vector());
}

Vocabulary Vocabulary::create(int dimension, std::uint64_t seed) {
  for (std::uint64_t trial = seed;; ++trial) {
    Vocabulary v(dimension, trial);
    if (dimension < 256) return v;
    const hrr::HyperVector* atoms[7] = {&v.types_[0], &v.types_[1], &v.types_[2],
                                        &v.target_,   &v.ego_,      &v.axis_x_.vector(),
                                        &v.axis_y_.vector()};
    bool ok = true;
    for (int i = 0; i < 7 && ok; ++i)
      for (int j = i + 1; j < 7 && ok; ++j)
        if (std::abs(hrr::similarity(*atoms[i], *atoms[j])) >= 0.2) ok = false;
    if (ok) return v;
  }
}

const hrr::HyperVector& Vocabulary::type_vector(ObjectType t) const {
  return types_[static_cast<std::size_t>(t)];
}

const hrr::Spectrum& Vocabulary::type_spectrum(ObjectType t) const {
  return spec_types_[static_cast<std::size_t>(t)];
}

void Vocabulary::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["version"] = 1;
  j["dimension"] = dimension_;
  j["seed"] = seed_;
  j["names"] = std::vector<std::string>(std::begin(kAtomNames), std::end(kAtomNames));
  write_text_file(path, j.dump(2) + "\n");
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrKind::schema, "vocabulary file: " + std::string(e.what()));
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw Error(ErrKind::schema, "unsupported vocabulary file version");
  if (!j.contains("dimension") || !j.contains("seed"))
    throw Error(ErrKind::schema, "vocabulary file missing dimension/seed");
  // The stored seed already passed the similarity screen at save time.
  return Vocabulary(j["dimension"].get<int>(), j["seed"].get<std::uint64_t>());
}

SceneVector encode_scene_power(const SceneSnapshot& snapshot, const Vocabulary& vocab,
                               double radius, double scale) {
  check_snapshot(snapshot);
  check_radius_scale(radius, scale);
  const auto& kn = kernels::active();

  std::vector<cplx> acc(vocab.target_spectrum().bin_count());
  std::vector<cplx> rot;
  position_rotation(vocab, snapshot.target.x / scale, snapshot.target.y / scale, rot);
  kn.cmul(vocab.target_spectrum().bins.data(),
          vocab.type_spectrum(snapshot.target.type).bins.data(), acc.data(), acc.size());
  std::vector<cplx> tmp(acc.size());
  kn.cmul(acc.data(), rot.data(), tmp.data(), acc.size());
  acc.swap(tmp);

  for (const auto& o : nearby_sorted(snapshot, radius)) {
    position_rotation(vocab, o.x / scale, o.y / scale, rot);
    kn.cmul_add(acc.data(), vocab.type_spectrum(o.type).bins.data(), rot.data(), acc.size());
  }

  Spectrum s;
  s.dimension = vocab.dimension();
  s.bins = std::move(acc);
  SceneVector out;
  out.vec = hrr::from_spectrum(s);
  out.vocab_seed = vocab.seed();
  out.timestamp = snapshot.timestamp;
  out.variant = EncodingVariant::power;
  out.scale = scale;
  out.radius = radius;
  return out;
}

SceneVector encode_scene_scalar(const SceneSnapshot& snapshot, const Vocabulary& vocab,
                                double radius) {
  check_snapshot(snapshot);
  check_radius_scale(radius, 1.0);
  const auto& kn = kernels::active();

  std::vector<cplx> acc(vocab.target_spectrum().bin_count());
  std::vector<cplx> pos;
  position_linear(vocab, snapshot.target.x, snapshot.target.y, pos);
  std::vector<cplx> marker(acc.size());
  kn.cmul(vocab.target_spectrum().bins.data(),
          vocab.type_spectrum(snapshot.target.type).bins.data(), marker.data(),
          marker.size());
  kn.cmul(marker.data(), pos.data(), acc.data(), acc.size());

  for (const auto& o : nearby_sorted(snapshot, radius)) {
    position_linear(vocab, o.x, o.y, pos);
    kn.cmul_add(acc.data(), vocab.type_spectrum(o.type).bins.data(), pos.data(), acc.size());
  }

  Spectrum s;
  s.dimension = vocab.dimension();
  s.bins = std::move(acc);
  SceneVector out;
  out.vec = hrr::from_spectrum(s);
  out.vocab_seed = vocab.seed();
  out.timestamp = snapshot.timestamp;
  out.variant = EncodingVariant::scalar;
  out.scale = 1.0;
  out.radius = radius;
  return out;
}

SceneVector encode_scene_power_ego(const SceneSnapshot& snapshot, const Vocabulary& vocab,
                                   double radius, double scale) {
  if (!snapshot.ego)
    throw Error(ErrKind::malformed_snapshot, "power_ego encoding needs an ego position");
  SceneVector out = encode_scene_power(snapshot, vocab, radius, scale);

  std::vector<cplx> rot;
  position_rotation(vocab, (*snapshot.ego)[0] / scale, (*snapshot.ego)[1] / scale, rot);
  Spectrum s;
  s.dimension = vocab.dimension();
  s.bins.resize(rot.size());
  kernels::active().cmul(vocab.ego_spectrum().bins.data(), rot.data(), s.bins.data(),
                         s.bins.size());
  hrr::HyperVector ego_term = hrr::from_spectrum(s);
  hrr::add_in_place(out.vec, ego_term);
  out.variant = EncodingVariant::power_ego;
  return out;
}

std::string Probe::description() const {
  std::string t = std::string("TYPE_") + type_name(type);
  return kind == Kind::target ? "TARGET*" + t : t;
}

std::pair<double, double> HeatMap::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return {xs[best / ys.size()], ys[best % ys.size()]};
}

std::string HeatMap::to_csv() const {
  std::string out = "x,y,similarity\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      out += format_double(xs[i]) + "," + format_double(ys[j]) + "," +
             format_double(at(i, j)) + "\n";
  return out;
}

HeatMap heat_map(const SceneVector& scene, const Vocabulary& vocab, const Probe& probe,
                 std::pair<double, double> x_range, std::pair<double, double> y_range,
                 double step) {
  if (scene.variant == EncodingVariant::scalar)
    throw Error(ErrKind::unsupported_probe,
                "scalar-encoded scenes do not support positional grid probes");
  if (scene.vocab_seed != vocab.seed())
    throw Error(ErrKind::config, "scene was encoded with a different vocabulary");
  if (!(step > 0.0)) throw Error(ErrKind::config, "step must be > 0");
  if (x_range.second < x_range.first || y_range.second < y_range.first)
    throw Error(ErrKind::config, "empty heat-map range");

  HeatMap hm;
  hm.probe = probe.description();
  for (double x = x_range.first; x <= x_range.second + 1e-9; x += step) hm.xs.push_back(x);
  for (double y = y_range.first; y <= y_range.second + 1e-9; y += step) hm.ys.push_back(y);

  Spectrum ss = hrr::spectrum_of(scene.vec);
  std::vector<cplx> pbins = vocab.type_spectrum(probe.type).bins;
  if (probe.kind == Probe::Kind::target) {
    std::vector<cplx> tmp(pbins.size());
    kernels::active().cmul(vocab.target_spectrum().bins.data(), pbins.data(), tmp.data(),
                           tmp.size());
    pbins.swap(tmp);
  }

  // dot(S, P (x) X^a (x) Y^b) over the half spectrum: conjugate the probe,
  // rotate by the grid phases, weight interior bins by 2.
  std::size_t nb = pbins.size();
  std::vector<double> g_re(nb), g_im(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    cplx g = ss.bins[k] * std::conj(pbins[k]);
    g_re[k] = g.real();
    g_im[k] = g.imag();
  }

  auto px = vocab.axis_x().phases();
  auto py = vocab.axis_y().phases();
  bool even = (vocab.dimension() % 2 == 0);
  std::size_t interior_hi = even ? nb - 1 : nb;

  std::vector<double> cax(hm.xs.size() * nb), sax(hm.xs.size() * nb);
  for (std::size_t i = 0; i < hm.xs.size(); ++i) {
    double a = hm.xs[i] / scene.scale;
    for (std::size_t k = 0; k < nb; ++k) {
      cax[i * nb + k] = std::cos(a * px[k]);
      sax[i * nb + k] = std::sin(a * px[k]);
    }
  }
  std::vector<double> cby(hm.ys.size() * nb), sby(hm.ys.size() * nb);
  for (std::size_t j = 0; j < hm.ys.size(); ++j) {
    double b = hm.ys[j] / scene.scale;
    for (std::size_t k = 0; k < nb; ++k) {
      cby[j * nb + k] = std::cos(b * py[k]);
      sby[j * nb + k] = std::sin(b * py[k]);
    }
  }

  hm.values.assign(hm.xs.size() * hm.ys.size(), 0.0);
  double inv_d = 1.0 / vocab.dimension();
  for (std::size_t i = 0; i < hm.xs.size(); ++i) {
    const double* ca = &cax[i * nb];
    const double* sa = &sax[i * nb];
    for (std::size_t j = 0; j < hm.ys.size(); ++j) {
      const double* cb = &cby[j * nb];
      const double* sb = &sby[j * nb];
      double sum = g_re[0] * ca[0] * cb[0];  // DC (phases are 0, so ca=cb=1)
      for (std::size_t k = 1; k < interior_hi; ++k) {
        double cphi = ca[k] * cb[k] - sa[k] * sb[k];
        double sphi = sa[k] * cb[k] + ca[k] * sb[k];
        sum += 2.0 * (g_re[k] * cphi + g_im[k] * sphi);
      }
      if (even) sum += g_re[nb - 1] * ca[nb - 1] * cb[nb - 1];
      hm.values[i * hm.ys.size() + j] = sum * inv_d;
    }
  }
  return hm;
}

}  // namespace holotraj::scene
