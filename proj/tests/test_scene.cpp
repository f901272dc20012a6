#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "holotraj/error.hpp"
#include "holotraj/rng.hpp"
#include "holotraj/scene.hpp"

using namespace holotraj;
using scene::EncodingVariant;
using scene::ObjectType;
using scene::Probe;
using scene::SceneObject;
using scene::SceneSnapshot;
using scene::Vocabulary;

namespace {

double max_abs_diff(const hrr::HyperVector& a, const hrr::HyperVector& b) {
  double m = 0.0;
  for (int i = 0; i < a.dimension(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Independent oracle route: probe vectors assembled op by op.
double explicit_similarity(const scene::SceneVector& s, const Vocabulary& vocab,
                           const Probe& probe, double x, double y) {
  hrr::HyperVector p = vocab.type_vector(probe.type);
  if (probe.kind == Probe::Kind::target) p = hrr::bind(vocab.target_marker(), p);
  hrr::HyperVector pos = hrr::bind(hrr::power(vocab.axis_x(), x / s.scale),
                                   hrr::power(vocab.axis_y(), y / s.scale));
  return hrr::similarity(s.vec, hrr::bind(p, pos));
}

SceneSnapshot generic_scene() {
  SceneSnapshot snap;
  snap.timestamp = 1.25;
  snap.target = {42, 0.0, 0.0, ObjectType::car};
  snap.others = {{7, 10.0, 2.0, ObjectType::car}, {3, -5.5, 3.0, ObjectType::truck}};
  snap.ego = {{-12.0, -3.5}};
  return snap;
}

}  // namespace

TEST_CASE("vocabulary generation, screening and persistence") {
  Vocabulary v1 = Vocabulary::create(512, 9);
  Vocabulary v2 = Vocabulary::create(512, 9);
  CHECK(v1.seed() == v2.seed());
  CHECK(max_abs_diff(v1.target_marker(), v2.target_marker()) == 0.0);

  const hrr::HyperVector* atoms[7] = {
      &v1.type_vector(ObjectType::car),        &v1.type_vector(ObjectType::truck),
      &v1.type_vector(ObjectType::motorcycle), &v1.target_marker(),
      &v1.ego_marker(),                        &v1.axis_x().vector(),
      &v1.axis_y().vector()};
  for (int i = 0; i < 7; ++i) {
    CHECK(std::abs(hrr::norm(*atoms[i]) - 1.0) < 1e-9);
    for (int j = i + 1; j < 7; ++j)
      CHECK(std::abs(hrr::similarity(*atoms[i], *atoms[j])) < 0.2);
  }

  auto path = std::filesystem::temp_directory_path() / "holotraj_vocab_test.json";
  v1.save(path);
  Vocabulary v3 = Vocabulary::load(path);
  CHECK(v3.dimension() == 512);
  CHECK(max_abs_diff(v1.axis_x().vector(), v3.axis_x().vector()) == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("power encoding: target at origin reduces to TARGET (x) TYPE") {
  Vocabulary vocab = Vocabulary::create(256, 3);
  SceneSnapshot snap;
  snap.target = {1, 0.0, 0.0, ObjectType::truck};
  auto s = scene::encode_scene_power(snap, vocab);
  hrr::HyperVector expect =
      hrr::bind(vocab.target_marker(), vocab.type_vector(ObjectType::truck));
  CHECK(max_abs_diff(s.vec, expect) < 1e-10);
}

TEST_CASE("radius filter excludes far objects exactly") {
  Vocabulary vocab = Vocabulary::create(256, 3);
  SceneSnapshot base;
  base.target = {1, 0.0, 0.0, ObjectType::car};
  auto s0 = scene::encode_scene_power(base, vocab, 40.0, 1.0);

  SceneSnapshot with_far = base;
  with_far.others = {{2, 41.0, 0.0, ObjectType::car}};
  auto s1 = scene::encode_scene_power(with_far, vocab, 40.0, 1.0);
  CHECK(max_abs_diff(s0.vec, s1.vec) == 0.0);

  SceneSnapshot with_near = base;
  with_near.others = {{2, 39.0, 0.0, ObjectType::car}};
  auto s2 = scene::encode_scene_power(with_near, vocab, 40.0, 1.0);
  CHECK(max_abs_diff(s0.vec, s2.vec) > 0.1);
}

TEST_CASE("power encoding matches the op-by-op construction") {
  Vocabulary vocab = Vocabulary::create(128, 11);
  SceneSnapshot snap = generic_scene();
  auto s = scene::encode_scene_power(snap, vocab, 40.0, 2.0);

  auto term = [&](const hrr::HyperVector& marker, double x, double y) {
    return hrr::bind(marker, hrr::bind(hrr::power(vocab.axis_x(), x / 2.0),
                                       hrr::power(vocab.axis_y(), y / 2.0)));
  };
  hrr::HyperVector expect =
      term(hrr::bind(vocab.target_marker(), vocab.type_vector(ObjectType::car)), 0.0, 0.0);
  hrr::add_in_place(expect, term(vocab.type_vector(ObjectType::truck), -5.5, 3.0));
  hrr::add_in_place(expect, term(vocab.type_vector(ObjectType::car), 10.0, 2.0));
  CHECK(max_abs_diff(s.vec, expect) < 1e-10);
}

TEST_CASE("permutation invariance is bitwise") {
  Vocabulary vocab = Vocabulary::create(128, 5);
  SceneSnapshot a = generic_scene();
  SceneSnapshot b = a;
  std::swap(b.others[0], b.others[1]);
  auto sa = scene::encode_scene_power(a, vocab);
  auto sb = scene::encode_scene_power(b, vocab);
  CHECK(max_abs_diff(sa.vec, sb.vec) == 0.0);
}

TEST_CASE("scalar encoding") {
  Vocabulary vocab = Vocabulary::create(256, 17);
  SceneSnapshot snap;
  snap.target = {1, 0.0, 0.0, ObjectType::car};
  auto s0 = scene::encode_scene_scalar(snap, vocab);
  CHECK(hrr::norm(s0.vec) < 1e-12);  // 0*X (+) 0*Y

  snap.target = {1, 1.0, 0.0, ObjectType::car};
  auto s1 = scene::encode_scene_scalar(snap, vocab);
  hrr::HyperVector expect =
      hrr::bind(hrr::bind(vocab.target_marker(), vocab.type_vector(ObjectType::car)),
                vocab.axis_x().vector());
  CHECK(max_abs_diff(s1.vec, expect) < 1e-10);

  snap.target = {1, 3.0, -2.0, ObjectType::car};
  auto sa = scene::encode_scene_scalar(snap, vocab);
  snap.target = {1, 6.0, -4.0, ObjectType::car};
  auto sb = scene::encode_scene_scalar(snap, vocab);
  CHECK(max_abs_diff(hrr::scaled(sa.vec, 2.0), sb.vec) < 1e-10);
}

TEST_CASE("power+ego encoding is the power encoding plus an ego term") {
  Vocabulary vocab = Vocabulary::create(128, 23);
  SceneSnapshot snap = generic_scene();
  auto with_ego = scene::encode_scene_power_ego(snap, vocab);
  auto without = scene::encode_scene_power(snap, vocab);

  hrr::HyperVector diff = with_ego.vec;
  hrr::add_in_place(diff, hrr::scaled(without.vec, -1.0));
  hrr::HyperVector ego_term =
      hrr::bind(vocab.ego_marker(), hrr::bind(hrr::power(vocab.axis_x(), -12.0),
                                              hrr::power(vocab.axis_y(), -3.5)));
  CHECK(max_abs_diff(diff, ego_term) < 1e-10);

  SceneSnapshot at_target = snap;
  at_target.ego = {{0.0, 0.0}};
  auto s = scene::encode_scene_power_ego(at_target, vocab);
  hrr::HyperVector expect = without.vec;
  hrr::add_in_place(expect, vocab.ego_marker());
  CHECK(max_abs_diff(s.vec, expect) < 1e-10);

  SceneSnapshot no_ego = snap;
  no_ego.ego.reset();
  CHECK_THROWS_AS(scene::encode_scene_power_ego(no_ego, vocab), Error);
}

TEST_CASE("ego locality at D=512") {
  Vocabulary vocab = Vocabulary::create(512, 29);
  SceneSnapshot snap = generic_scene();
  auto s = scene::encode_scene_power_ego(snap, vocab);
  auto probe_at = [&](double x, double y) {
    return hrr::similarity(
        s.vec, hrr::bind(vocab.ego_marker(), hrr::bind(hrr::power(vocab.axis_x(), x),
                                                       hrr::power(vocab.axis_y(), y))));
  };
  CHECK(probe_at(-12.0, -3.5) > probe_at(-2.0, -3.5));
}

TEST_CASE("heat map values match the explicit probe oracle") {
  Vocabulary vocab = Vocabulary::create(256, 31);
  SceneSnapshot snap = generic_scene();
  auto s = scene::encode_scene_power(snap, vocab, 40.0, 1.0);

  for (auto kind : {Probe::Kind::target, Probe::Kind::others}) {
    Probe probe{kind, ObjectType::car};
    auto hm = scene::heat_map(s, vocab, probe, {-12.0, 12.0}, {-4.0, 4.0}, 2.0);
    for (std::size_t i = 0; i < hm.xs.size(); ++i)
      for (std::size_t j = 0; j < hm.ys.size(); ++j) {
        double oracle = explicit_similarity(s, vocab, probe, hm.xs[i], hm.ys[j]);
        CHECK(hm.at(i, j) == doctest::Approx(oracle).epsilon(1e-9));
      }
  }
}

TEST_CASE("target-probe heat map peaks at the target position") {
  int hits = 0;
  for (int rep = 0; rep < 20; ++rep) {
    Vocabulary vocab = Vocabulary::create(512, 1000 + static_cast<std::uint64_t>(rep));
    Rng rng(static_cast<std::uint64_t>(rep) + 55);
    double tx = rng.uniform(-35.0, 35.0);
    double ty = rng.uniform(-8.0, 8.0);
    SceneSnapshot snap;
    snap.target = {1, tx, ty, ObjectType::car};
    auto s = scene::encode_scene_power(snap, vocab);
    auto hm = scene::heat_map(s, vocab, Probe{Probe::Kind::target, ObjectType::car});
    auto [px, py] = hm.argmax();
    if (std::abs(px - tx) <= 0.5 + 1e-9 && std::abs(py - ty) <= 0.5 + 1e-9) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("others-probe on an empty scene stays inside the cross-talk bound") {
  for (int rep = 0; rep < 20; ++rep) {
    Vocabulary vocab = Vocabulary::create(512, 2000 + static_cast<std::uint64_t>(rep));
    SceneSnapshot snap;
    snap.target = {1, 5.0, 1.0, ObjectType::car};
    auto s = scene::encode_scene_power(snap, vocab);
    auto hm = scene::heat_map(s, vocab, Probe{Probe::Kind::others, ObjectType::truck},
                              {-20.0, 20.0}, {-8.0, 8.0}, 1.0);
    double worst = 0.0;
    for (double v : hm.values) worst = std::max(worst, std::abs(v));
    CHECK(worst < 5.0 / std::sqrt(512.0));
  }
}

TEST_CASE("two cars give two local maxima") {
  Vocabulary vocab = Vocabulary::create(512, 71);
  SceneSnapshot snap;
  snap.target = {1, 0.0, 0.0, ObjectType::truck};
  snap.others = {{2, 12.0, 3.0, ObjectType::car}, {3, -8.0, -2.0, ObjectType::car}};
  auto s = scene::encode_scene_power(snap, vocab);
  auto hm = scene::heat_map(s, vocab, Probe{Probe::Kind::others, ObjectType::car});

  auto value_at = [&](double x, double y) {
    std::size_t i = static_cast<std::size_t>(std::llround((x - hm.xs[0]) / 0.5));
    std::size_t j = static_cast<std::size_t>(std::llround((y - hm.ys[0]) / 0.5));
    return hm.at(i, j);
  };
  for (auto [cx, cy] : {std::pair<double, double>{12.0, 3.0}, {-8.0, -2.0}}) {
    double center = value_at(cx, cy);
    CHECK(center > 0.5);
    for (auto [dx, dy] :
         {std::pair<double, double>{3.0, 0.0}, {-3.0, 0.0}, {0.0, 3.0}, {0.0, -3.0}})
      CHECK(center > value_at(cx + dx, cy + dy));
  }
}

TEST_CASE("variant separation on a generic scene") {
  Vocabulary vocab = Vocabulary::create(512, 83);
  SceneSnapshot snap = generic_scene();
  snap.target = {42, 4.0, 1.0, ObjectType::car};
  auto p = scene::encode_scene_power(snap, vocab);
  auto sc = scene::encode_scene_scalar(snap, vocab);
  auto pe = scene::encode_scene_power_ego(snap, vocab);
  auto cosine = [](const hrr::HyperVector& a, const hrr::HyperVector& b) {
    return hrr::similarity(a, b) / (hrr::norm(a) * hrr::norm(b));
  };
  CHECK(cosine(p.vec, sc.vec) < 0.9);
  CHECK(cosine(p.vec, pe.vec) < 0.9);
  CHECK(cosine(sc.vec, pe.vec) < 0.9);
}

TEST_CASE("heat map rejects scalar scenes and bad grids") {
  Vocabulary vocab = Vocabulary::create(128, 2);
  SceneSnapshot snap;
  snap.target = {1, 1.0, 0.0, ObjectType::car};
  auto s = scene::encode_scene_scalar(snap, vocab);
  CHECK_THROWS_AS(scene::heat_map(s, vocab, Probe{}), Error);
  try {
    scene::heat_map(s, vocab, Probe{});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::unsupported_probe);
  }
  auto sp = scene::encode_scene_power(snap, vocab);
  CHECK_THROWS_AS(scene::heat_map(sp, vocab, Probe{}, {-1.0, 1.0}, {-1.0, 1.0}, 0.0),
                  Error);

  SceneSnapshot bad;
  bad.target = {1, std::nan(""), 0.0, ObjectType::car};
  CHECK_THROWS_AS(scene::encode_scene_power(bad, vocab), Error);
}

TEST_CASE("heat map CSV export") {
  Vocabulary vocab = Vocabulary::create(64, 2);
  SceneSnapshot snap;
  snap.target = {1, 0.0, 0.0, ObjectType::car};
  auto s = scene::encode_scene_power(snap, vocab);
  auto hm = scene::heat_map(s, vocab, Probe{}, {0.0, 1.0}, {0.0, 1.0}, 1.0);
  std::string csv = hm.to_csv();
  CHECK(csv.substr(0, 15) == "x,y,similarity\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 cells
}
