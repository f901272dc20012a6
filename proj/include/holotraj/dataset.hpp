#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "holotraj/scene.hpp"

namespace holotraj::data {

constexpr int kHistoryFrames = 20;
constexpr int kFutureFrames = 20;
constexpr double kDefaultFramePeriod = 0.25;  // s; 20 frames span 5 s

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One object's state at one timestamp, canonical object-list row.
struct ObjectFrame {
  double t = 0.0;
  std::int64_t id = 0;
  double x = 0.0, y = 0.0;
  double vx = kNaN, vy = kNaN;
  double ax = kNaN, ay = kNaN;
  double p_car = 1.0, p_truck = 0.0, p_moto = 0.0;
  int lane = 0;
  bool lane_known = false;
  double dl = kNaN, dr = kNaN;  // distance to left/right lane border
  bool is_ego = false;
};

struct TrackedObject {
  std::int64_t id = 0;
  bool is_ego = false;
  std::vector<ObjectFrame> frames;  // strictly increasing t, gap-free
};

// Adapts external column names and units to the canonical schema.
struct ColumnMapping {
  std::map<std::string, std::string> columns;  // canonical field -> source column
  std::map<std::string, double> scales;        // canonical field -> unit factor

  static ColumnMapping from_json_file(const std::filesystem::path& path);
};

struct LoadOptions {
  std::optional<ColumnMapping> mapping;
  std::optional<double> frame_period;  // inferred from the median spacing when absent
};

/// Parses an object-list CSV into validated, time-sorted tracks. Objects with
/// gaps longer than two frame periods are split into separate tracks.
std::vector<TrackedObject> load(const std::filesystem::path& path,
                                const LoadOptions& options = {});

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

ValidationReport validate(const std::filesystem::path& path,
                          const LoadOptions& options = {});

/// Writes rows in the canonical column order, sorted by (t, id).
void write_object_list(const std::filesystem::path& path,
                       std::span<const ObjectFrame> rows);

// A (history, future, labels) unit for one target vehicle at one anchor
// frame. Scene snapshots are materialized on demand from the owning TrackSet;
// future positions are target-centric at the anchor.
struct Sample {
  std::int32_t track_index = -1;
  std::int64_t target_id = 0;
  std::int32_t anchor_index = 0;
  double anchor_t = 0.0;
  std::array<double, 2> anchor_pos{};
  std::array<std::array<double, 2>, kFutureFrames> future{};
  bool lane_change_past = false;
  bool lane_change_future = false;
  bool crowded = false;
  bool crowd_label_ok = false;
};

// Tracks plus a frame-grid time index; the context every sample refers into.
class TrackSet {
public:
  TrackSet(std::vector<TrackedObject> tracks, double frame_period);

  const std::vector<TrackedObject>& tracks() const { return tracks_; }
  double frame_period() const { return frame_period_; }

  scene::ObjectType track_type(std::size_t track_index) const;
  // Debounced lane id per frame; empty when lane info is missing somewhere.
  std::span<const int> stable_lanes(std::size_t track_index) const;

  std::int64_t grid_index(double t) const;

  struct Visible {
    std::int32_t track;
    std::int32_t frame;
  };
  std::span<const Visible> visible_at(std::int64_t grid) const;

  const ObjectFrame& history_frame(const Sample& s, int step) const;  // step 0..19, 19 = anchor
  scene::SceneSnapshot history_snapshot(const Sample& s, int step) const;

private:
  std::vector<TrackedObject> tracks_;
  double frame_period_;
  std::vector<scene::ObjectType> types_;
  std::vector<std::vector<int>> stable_lanes_;
  std::unordered_map<std::int64_t, std::vector<Visible>> visible_;
};

struct WindowResult {
  std::vector<Sample> samples;
  std::int64_t skipped_no_lane = 0;   // windows dropped for missing lane labels
  std::int64_t crowd_unknown = 0;     // kept, but without a crowded label
};

/// One sample per (non-ego target, anchor frame) with 20 past and 20 future
/// frames available. `anchor_stride` > 1 subsamples anchors for large sets.
WindowResult window(const TrackSet& ts, int anchor_stride = 1);

/// past/future lane-change flags for the sample's target. A lane id must
/// persist at least two frames to count as a change.
std::pair<bool, bool> label_lane_change(const TrackSet& ts, const Sample& s);

/// True iff at the anchor frame: target-ego distance < 20 m, nearest other
/// vehicle < 20 m, and at least 3 other vehicles are present.
bool label_crowded(const TrackSet& ts, const Sample& s);

struct Split {
  std::vector<std::int64_t> train_ids;
  std::vector<std::int64_t> val_ids;
};

/// Partitions target object ids (never samples), deterministic per seed.
Split split_ids(const TrackSet& ts, double train_fraction, std::uint64_t seed);

enum class Selector {
  all,
  lane_change_any,
  lane_change_future,
  crowded,
  crowded_and_lane_change,
};

const char* selector_name(Selector s);
std::optional<Selector> selector_from_name(const std::string& name);

std::vector<Sample> select_subset(const std::vector<Sample>& samples, Selector sel);

std::vector<Sample> filter_by_ids(const std::vector<Sample>& samples,
                                  std::span<const std::int64_t> ids);

struct CompositionReport {
  std::string label;
  std::int64_t total = 0;
  std::int64_t none = 0;
  std::int64_t past = 0;    // lane change in the history window
  std::int64_t future = 0;  // lane change in the prediction window
  std::int64_t overlap = 0; // both; past/future are not disjoint
  std::int64_t crowded = 0;
  std::int64_t excluded_no_lane = 0;
  std::int64_t crowd_unknown = 0;

  bool empty() const { return total == 0; }
  std::int64_t any() const { return past + future - overlap; }
  double pct(std::int64_t count) const {
    return total == 0 ? 0.0 : 100.0 * double(count) / double(total);
  }
};

CompositionReport composition_report(const std::vector<Sample>& samples);
CompositionReport composition_report(const WindowResult& wr);

/// Loads a precomputed counts file {label,total,none,past,future,overlap[,crowded]}.
CompositionReport composition_from_counts(const std::filesystem::path& path);

/// Human-readable table, percentages to one decimal.
std::string format_composition(const CompositionReport& r);
std::string composition_to_json(const CompositionReport& r);

}  // namespace holotraj::data
