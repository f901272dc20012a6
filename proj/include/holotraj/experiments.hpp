#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "holotraj/dataset.hpp"
#include "holotraj/models.hpp"

namespace holotraj::experiments {

// The (training subset x evaluation subset) matrix: training on {all,
// lane-change} and evaluating on {all, lane-change, crowded, crowded
// lane-change} spans the eight standard setups (a)-(h).
struct ExperimentPlan {
  std::vector<std::string> datasets;
  std::optional<std::string> mapping;
  double frame_period = data::kDefaultFramePeriod;
  int anchor_stride = 1;
  int vocab_dimension = 512;
  std::uint64_t vocab_seed = 1;
  double radius = scene::kDefaultRadius;
  double scale = scene::kDefaultScale;
  double split_fraction = 0.9;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<data::Selector> train_selectors = {data::Selector::all,
                                                 data::Selector::lane_change_any};
  std::vector<data::Selector> eval_selectors = {
      data::Selector::all, data::Selector::lane_change_any, data::Selector::crowded,
      data::Selector::crowded_and_lane_change};
  bool allow_extended_selectors = false;
  std::vector<models::ModelConfig> model_configs;

  static ExperimentPlan from_json_file(const std::filesystem::path& path);
  static ExperimentPlan from_json_text(const std::string& text);
  std::string to_json() const;
  void validate() const;
};

// "a".."h" for the standard pairs, "x" for flagged extensions.
std::string setup_id(data::Selector train_sel, data::Selector eval_sel);

struct CellInfo {
  std::string model;
  std::string train_selector;
  std::uint64_t seed = 0;
  std::string hash;
  std::string status;  // "ok" or "failed: <reason>"
  std::size_t train_samples = 0;
};

struct ResultRow {
  std::string model;
  std::string train_selector;
  std::string eval_selector;
  std::string setup;
  std::vector<std::uint64_t> seeds_used;
  std::vector<std::size_t> eval_counts;
  bool empty = false;
  std::array<double, data::kFutureFrames> rmse_x_mean{}, rmse_x_std{};
  std::array<double, data::kFutureFrames> rmse_y_mean{}, rmse_y_std{};
  double aggregate_mean = 0.0;
  double aggregate_std = 0.0;
};

struct ComparisonReport {
  std::string plan_hash;
  std::string data_fingerprint;
  int vocab_dimension = 0;
  std::uint64_t vocab_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<CellInfo> cells;
  std::vector<ResultRow> rows;

  std::string to_json() const;
  static ComparisonReport from_json_text(const std::string& text);
  const ResultRow* find(const std::string& model, const std::string& train_sel,
                        const std::string& eval_sel) const;
};

struct RunStats {
  int cells_trained = 0;
  int cells_reused = 0;
  int cells_failed = 0;
};

/// Executes the full matrix: per seed, split by object id, build the training
/// subsets, train every model on each, evaluate on every evaluation subset.
/// Finished cells (content-addressed directories under out/cells) are reused,
/// so re-running a completed plan performs zero training steps.
ComparisonReport run(const ExperimentPlan& plan, const std::filesystem::path& outdir,
                     int jobs = 1, bool allow_partial = false,
                     RunStats* stats = nullptr);

struct CompareEntry {
  std::string model;
  double value = 0.0;
  bool missing = false;
};

struct SetupRanking {
  std::string setup;
  std::string train_selector;
  std::string eval_selector;
  std::vector<CompareEntry> entries;  // sorted ascending, missing cells last
};

struct TrainingEffect {
  std::string model;
  std::string eval_selector;
  double all_trained = 0.0;
  double lc_trained = 0.0;
  double delta = 0.0;  // lc - all; negative means the lane-change-trained model wins
  bool complete = false;
};

struct CompareResult {
  std::string metric;
  int horizon_step = data::kFutureFrames;
  std::vector<SetupRanking> setups;
  std::vector<TrainingEffect> effects;

  std::string text() const;
  std::string to_json() const;
};

/// Ranks models per setup by `metric` ("rmse_x", "rmse_y" or "aggregate") at
/// a 1-based horizon step; missing cells get explicit gap markers.
CompareResult compare(const ComparisonReport& report, const std::string& metric = "rmse_y",
                      int horizon_step = data::kFutureFrames);

}  // namespace holotraj::experiments
