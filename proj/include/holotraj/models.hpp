#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holotraj/dataset.hpp"
#include "holotraj/scene.hpp"

namespace holotraj::models {

enum class Variant { linear, lstm_numerical, lstm_spa1, lstm_spa2, lstm_spa3 };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);
bool is_spa(Variant v);
scene::EncodingVariant spa_encoding(Variant v);  // spa variants only

struct ModelConfig {
  Variant variant = Variant::lstm_numerical;
  int input_dim = 2;  // 2 for numerical, vocabulary dimension for SPA inputs
  int hidden = 128;
  int horizon = data::kFutureFrames;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 20;
  double grad_clip = 5.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Internal position normalization (meters per unit). Raw highway positions
  // span hundreds of meters longitudinally and a few meters laterally, which
  // would saturate the gates; the network sees positions divided by these and
  // its outputs are multiplied back, so the external interface stays metric.
  double pos_scale_x = 100.0;
  double pos_scale_y = 5.0;
  std::uint64_t seed = 1;

  void validate() const;
  static ModelConfig defaults(Variant v);
};

std::string config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const std::string& text);

struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

using Vec = std::vector<double>;

// Encoder-decoder LSTM parameters. Gate order in the stacked 4H rows is
// [input, forget, cell, output]. The decoder consumes the previous predicted
// position through a learned 2x2 projection; the output projection maps the
// decoder hidden state to a 2D position.
struct LstmWeights {
  Mat enc_wx, enc_wh;
  Vec enc_b;
  Mat dec_wx, dec_wh;
  Vec dec_b;
  Mat in_proj_w;
  Vec in_proj_b;
  Mat out_w;
  Vec out_b;
};

struct TensorView {
  const char* name;
  double* data;
  std::size_t size;
};

std::vector<TensorView> tensor_views(LstmWeights& w);

LstmWeights init_weights(const ModelConfig& c);
LstmWeights zero_like(const ModelConfig& c);

// Layer roles and shapes excluding the input dimension; used to assert that
// variants differ only in their input encoding.
std::string architecture_signature(const ModelConfig& c);

using Positions = std::array<std::array<double, 2>, data::kFutureFrames>;

// Per-sample encoded input sequences plus targets, stored flat:
// inputs[(sample * horizon + step) * input_dim + d].
struct TrainData {
  int input_dim = 2;
  std::vector<double> inputs;
  std::vector<Positions> targets;

  std::size_t count() const { return targets.size(); }
  const double* input_of(std::size_t sample, int step) const {
    return inputs.data() +
           (sample * static_cast<std::size_t>(data::kHistoryFrames) +
            static_cast<std::size_t>(step)) *
               static_cast<std::size_t>(input_dim);
  }
};

/// Deterministic forward pass over 20 input steps; throws numeric_overflow
/// naming the first offending step if activations leave the finite range.
Positions predict(const LstmWeights& w, const ModelConfig& c, const double* inputs);

double sample_loss(const LstmWeights& w, const ModelConfig& c, const double* inputs,
                   const Positions& target);

/// MSE loss plus parameter gradients (accumulated into `grad`).
double loss_and_gradients(const LstmWeights& w, const ModelConfig& c, const double* inputs,
                          const Positions& target, LstmWeights& grad);

/// Constant-velocity extrapolation of the anchor-frame velocity; falls back
/// to a finite difference of the last two history frames when the stored
/// velocity is missing.
Positions predict_linear(const data::TrackSet& ts, const data::Sample& s);

/// Builds the 20-step input sequence for a sample: raw positions for the
/// numerical variant, scene vectors for the SPA variants. `out` receives
/// 20 * input_dim values.
void encode_inputs(const data::TrackSet& ts, const data::Sample& s,
                   const scene::Vocabulary* vocab, Variant variant, double radius,
                   double scale, double* out);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when no validation set
  double wall_s = 0.0;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string data_fingerprint;

  std::string to_jsonl() const;
};

struct TrainResult {
  LstmWeights weights;
  TrainLog log;
};

/// Adam + BPTT over the batched MSE objective. Fully seeded: shuffling,
/// batching and initialization are functions of (config, data).
TrainResult train(const ModelConfig& c, const TrainData& train_set,
                  const TrainData& val_set, const std::string& data_fingerprint = "");

struct EvalReport {
  std::size_t count = 0;
  std::array<double, data::kFutureFrames> rmse_x{};
  std::array<double, data::kFutureFrames> rmse_y{};
  double aggregate = 0.0;  // sqrt(mean squared Euclidean error over all steps)

  bool empty() const { return count == 0; }
};

EvalReport evaluate(std::span<const Positions> predictions,
                    std::span<const Positions> targets);
std::string eval_to_json(const EvalReport& r);
EvalReport eval_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& c,
                     const LstmWeights& w, const TrainLog& log);

struct Checkpoint {
  ModelConfig config;
  LstmWeights weights;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace holotraj::models
