#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "holotraj/hrr.hpp"

namespace holotraj::scene {

enum class ObjectType { car = 0, truck = 1, motorcycle = 2 };

const char* type_name(ObjectType t);
std::optional<ObjectType> type_from_name(const std::string& name);

// The fixed set of named atomic vectors for one experiment. All vectors are
// regenerated from (dimension, seed); files never store raw values.
class Vocabulary {
public:
  // Generates atoms from `seed`; at dimensions >= 256 the seed is advanced
  // until all pairwise similarities among distinct atoms are below 0.2.
  static Vocabulary create(int dimension, std::uint64_t seed);

  int dimension() const { return dimension_; }
  std::uint64_t seed() const { return seed_; }  // effective seed

  const hrr::HyperVector& type_vector(ObjectType t) const;
  const hrr::HyperVector& target_marker() const { return target_; }
  const hrr::HyperVector& ego_marker() const { return ego_; }
  const hrr::UnitaryVector& axis_x() const { return axis_x_; }
  const hrr::UnitaryVector& axis_y() const { return axis_y_; }

  const hrr::Spectrum& type_spectrum(ObjectType t) const;
  const hrr::Spectrum& target_spectrum() const { return spec_target_; }
  const hrr::Spectrum& ego_spectrum() const { return spec_ego_; }
  const hrr::Spectrum& axis_x_spectrum() const { return spec_axis_x_; }
  const hrr::Spectrum& axis_y_spectrum() const { return spec_axis_y_; }

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

private:
  Vocabulary(int dimension, std::uint64_t seed);

  int dimension_;
  std::uint64_t seed_;
  std::array<hrr::HyperVector, 3> types_;
  hrr::HyperVector target_;
  hrr::HyperVector ego_;
  hrr::UnitaryVector axis_x_;
  hrr::UnitaryVector axis_y_;
  std::array<hrr::Spectrum, 3> spec_types_;
  hrr::Spectrum spec_target_;
  hrr::Spectrum spec_ego_;
  hrr::Spectrum spec_axis_x_;
  hrr::Spectrum spec_axis_y_;
};

struct SceneObject {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  ObjectType type = ObjectType::car;
};

// One object-list snapshot, positions in the target-centric road-aligned
// frame (x longitudinal, y lateral, meters).
struct SceneSnapshot {
  double timestamp = 0.0;
  SceneObject target;
  std::vector<SceneObject> others;
  std::optional<std::array<double, 2>> ego;
};

enum class EncodingVariant { power, scalar, power_ego };
const char* variant_name(EncodingVariant v);

struct SceneVector {
  hrr::HyperVector vec;
  std::uint64_t vocab_seed = 0;
  double timestamp = 0.0;
  EncodingVariant variant = EncodingVariant::power;
  double scale = 1.0;
  double radius = 40.0;
};

constexpr double kDefaultRadius = 40.0;  // m; neighbors farther out are noise
constexpr double kDefaultScale = 1.0;    // m per exponent unit

/// S = TARGET*TYPE_t*X^(x/s)*Y^(y/s) (+) sum over nearby objects of
/// TYPE*X^(x/s)*Y^(y/s). Objects farther than `radius` from the target are
/// skipped; the ego vehicle never enters the sum.
SceneVector encode_scene_power(const SceneSnapshot& snapshot, const Vocabulary& vocab,
                               double radius = kDefaultRadius,
                               double scale = kDefaultScale);

/// Position terms become x*X (+) y*Y instead of convolutive powers.
SceneVector encode_scene_scalar(const SceneSnapshot& snapshot, const Vocabulary& vocab,
                                double radius = kDefaultRadius);

/// Power encoding plus an EGO*X^(x/s)*Y^(y/s) term; the ego is always
/// included regardless of the radius filter.
SceneVector encode_scene_power_ego(const SceneSnapshot& snapshot, const Vocabulary& vocab,
                                   double radius = kDefaultRadius,
                                   double scale = kDefaultScale);

struct Probe {
  enum class Kind { target, others };
  Kind kind = Kind::target;
  ObjectType type = ObjectType::car;

  std::string description() const;
};

struct HeatMap {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;  // row-major [xs.size() x ys.size()]
  std::string probe;

  double at(std::size_t i, std::size_t j) const { return values[i * ys.size() + j]; }
  std::pair<double, double> argmax() const;
  std::string to_csv() const;
};

/// Similarity between the scene vector and probe vectors P*X^(a/s)*Y^(b/s)
/// over a position grid. Only power-encoded scenes support grid probing.
HeatMap heat_map(const SceneVector& scene, const Vocabulary& vocab, const Probe& probe,
                 std::pair<double, double> x_range = {-40.0, 40.0},
                 std::pair<double, double> y_range = {-10.0, 10.0},
                 double step = 0.5);

}  // namespace holotraj::scene
