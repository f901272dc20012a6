#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "holotraj/dataset.hpp"
#include "holotraj/error.hpp"
#include "holotraj/synth.hpp"
#include "holotraj/util.hpp"

using namespace holotraj;
using synth::GeneratedTrack;
using synth::HighwayConfig;

namespace {

HighwayConfig small_config() {
  HighwayConfig cfg;
  cfg.lanes = 3;
  cfg.vehicles = 12;
  cfg.duration_s = 60.0;
  cfg.lane_change_rate_per_min = 1.0;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("zero lane-change rate keeps every vehicle in its lane") {
  HighwayConfig cfg = small_config();
  cfg.lane_change_rate_per_min = 0.0;
  cfg.position_noise_std = 0.0;
  auto tracks = synth::generate(cfg);
  for (const auto& tr : tracks) {
    CHECK(tr.lane_changes.empty());
    int lane0 = tr.truth_lane.front();
    for (int lane : tr.truth_lane) CHECK(lane == lane0);
    double center = lane0 * cfg.lane_width;
    for (const auto& f : tr.frames) CHECK(f.y == center);
  }
}

TEST_CASE("generation is deterministic per seed") {
  auto a = synth::generate(small_config());
  auto b = synth::generate(small_config());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].frames.size() == b[i].frames.size());
    for (std::size_t k = 0; k < a[i].frames.size(); ++k) {
      CHECK(a[i].frames[k].x == b[i].frames[k].x);
      CHECK(a[i].frames[k].y == b[i].frames[k].y);
    }
  }
  HighwayConfig other = small_config();
  other.seed = 8;
  auto c = synth::generate(other);
  CHECK(a[1].frames[10].x != c[1].frames[10].x);
}

TEST_CASE("stored velocities are forward differences of the truth") {
  HighwayConfig cfg = small_config();
  cfg.position_noise_std = 0.35;  // noise must not affect the stored velocity
  auto tracks = synth::generate(cfg);
  for (const auto& tr : tracks) {
    for (std::size_t k = 0; k + 1 < tr.frames.size(); ++k) {
      double fdx = (tr.truth_x[k + 1] - tr.truth_x[k]) / cfg.frame_period_s;
      double fdy = (tr.truth_y[k + 1] - tr.truth_y[k]) / cfg.frame_period_s;
      CHECK(std::abs(tr.frames[k].vx - fdx) < 1e-6);
      CHECK(std::abs(tr.frames[k].vy - fdy) < 1e-6);
    }
  }
}

TEST_CASE("lane-change intervals are disjoint and span the configured duration") {
  HighwayConfig cfg = small_config();
  cfg.lane_change_rate_per_min = 3.0;
  cfg.duration_s = 300.0;
  auto tracks = synth::generate(cfg);
  int total = 0;
  for (const auto& tr : tracks) {
    for (std::size_t i = 0; i < tr.lane_changes.size(); ++i) {
      const auto& iv = tr.lane_changes[i];
      CHECK(iv.end_s - iv.start_s == doctest::Approx(cfg.lane_change_duration_s));
      CHECK(std::abs(iv.from_lane - iv.to_lane) == 1);
      if (i > 0) CHECK(iv.start_s >= tr.lane_changes[i - 1].end_s);
      ++total;
    }
    // lane ids only move inside declared intervals
    for (std::size_t k = 1; k < tr.truth_lane.size(); ++k) {
      if (tr.truth_lane[k] == tr.truth_lane[k - 1]) continue;
      double t = static_cast<double>(k) * cfg.frame_period_s;
      bool inside = false;
      for (const auto& iv : tr.lane_changes)
        if (t >= iv.start_s && t <= iv.end_s) inside = true;
      CHECK(inside);
    }
  }
  CHECK(total > 0);
}

TEST_CASE("lane-change count tracks the Poisson mean at scale") {
  HighwayConfig cfg;
  cfg.lanes = 3;
  cfg.vehicles = 200;
  cfg.duration_s = 600.0;
  cfg.lane_change_rate_per_min = 0.5;
  cfg.seed = 123;
  auto tracks = synth::generate(cfg);
  std::int64_t total = 0;
  for (const auto& tr : tracks) total += static_cast<std::int64_t>(tr.lane_changes.size());
  double expected = cfg.lane_change_rate_per_min * cfg.vehicles * cfg.duration_s / 60.0;
  CHECK(std::abs(static_cast<double>(total) - expected) < 0.15 * expected);

  // every track is visible for the full recording
  CHECK(tracks.size() == 200);
  for (const auto& tr : tracks)
    CHECK(static_cast<double>(tr.frames.size()) * cfg.frame_period_s >= 10.0);
}

TEST_CASE("zero noise means observed equals truth") {
  HighwayConfig cfg = small_config();
  cfg.position_noise_std = 0.0;
  auto tracks = synth::generate(cfg);
  for (const auto& tr : tracks)
    for (std::size_t k = 0; k < tr.frames.size(); ++k) {
      CHECK(tr.frames[k].x == tr.truth_x[k]);
      CHECK(tr.frames[k].y == tr.truth_y[k]);
    }
}

TEST_CASE("export / load / export round trip is byte-identical") {
  auto tracks = synth::generate(small_config());
  auto dir = std::filesystem::temp_directory_path() / "holotraj_synth_test";
  std::filesystem::create_directories(dir);
  auto p1 = dir / "a.csv";
  auto p2 = dir / "b.csv";
  synth::export_object_list(tracks, p1);

  auto loaded = data::load(p1);
  std::vector<data::ObjectFrame> rows;
  for (const auto& tr : loaded) rows.insert(rows.end(), tr.frames.begin(), tr.frames.end());
  data::write_object_list(p2, rows);
  CHECK(read_text_file(p1) == read_text_file(p2));

  auto report = data::validate(p1);
  CHECK(report.ok());
  CHECK(report.warnings.empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("infeasible configs are rejected") {
  HighwayConfig cfg = small_config();
  cfg.vehicles = 0;
  CHECK_THROWS_AS(synth::generate(cfg), Error);
  cfg = small_config();
  cfg.lanes = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.speed_min = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  try {
    HighwayConfig bad = small_config();
    bad.vehicles = 0;
    synth::generate(bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::config);
  }
}

TEST_CASE("config JSON round trip and unknown keys") {
  HighwayConfig cfg = small_config();
  auto dir = std::filesystem::temp_directory_path() / "holotraj_synth_cfg";
  std::filesystem::create_directories(dir);
  auto path = dir / "cfg.json";
  write_text_file(path, cfg.to_json());
  HighwayConfig back = HighwayConfig::from_json_file(path);
  CHECK(back.vehicles == cfg.vehicles);
  CHECK(back.lane_change_rate_per_min == cfg.lane_change_rate_per_min);
  CHECK(back.seed == cfg.seed);

  write_text_file(path, "{\"vehicle_count\": 5}\n");
  CHECK_THROWS_AS(HighwayConfig::from_json_file(path), Error);
  std::filesystem::remove_all(dir);
}
