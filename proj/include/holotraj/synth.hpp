#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "holotraj/dataset.hpp"
#include "holotraj/scene.hpp"

namespace holotraj::synth {

// Multi-lane highway recording generator: kinematically independent vehicles,
// Ornstein-Uhlenbeck speed perturbation, Poisson-scheduled lane changes with
// a minimum-jerk lateral blend, one designated ego track.
struct HighwayConfig {
  int lanes = 3;
  double lane_width = 3.5;        // m
  double duration_s = 60.0;
  double frame_period_s = data::kDefaultFramePeriod;
  int vehicles = 20;              // including the ego track (id 0)
  double speed_min = 22.0;        // m/s
  double speed_max = 33.0;
  double lane_change_rate_per_min = 0.5;  // expected changes per vehicle per minute
  double lane_change_duration_s = 4.0;
  double position_noise_std = 0.0;  // m, applied to observed positions only
  double speed_noise_std = 0.8;     // m/s, OU stationary std; 0 = constant speed
  double speed_noise_tau_s = 8.0;   // OU time constant
  double initial_spacing_m = 120.0;
  std::uint64_t seed = 1;

  void validate() const;
  static HighwayConfig from_json_file(const std::filesystem::path& path);
  std::string to_json() const;
};

struct LaneChangeInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  int from_lane = 0;
  int to_lane = 0;
};

struct GeneratedTrack {
  std::int64_t id = 0;
  scene::ObjectType type = scene::ObjectType::car;
  bool is_ego = false;
  std::vector<data::ObjectFrame> frames;  // observed values, what export writes
  std::vector<double> truth_x, truth_y;   // noise-free positions
  std::vector<int> truth_lane;
  std::vector<LaneChangeInterval> lane_changes;
};

std::vector<GeneratedTrack> generate(const HighwayConfig& config);

/// Writes the canonical object-list CSV; round-trips losslessly through
/// data::load.
void export_object_list(std::span<const GeneratedTrack> tracks,
                        const std::filesystem::path& path);

}  // namespace holotraj::synth
