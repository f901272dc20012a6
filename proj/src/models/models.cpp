#include <cmath>

#include <json.hpp>

#include "holotraj/error.hpp"
#include "holotraj/models.hpp"
#include "holotraj/util.hpp"

namespace holotraj::models {

std::string config_to_json(const ModelConfig& c) {
  nlohmann::json j;
  j["variant"] = variant_name(c.variant);
  j["input_dim"] = c.input_dim;
  j["hidden"] = c.hidden;
  j["horizon"] = c.horizon;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["grad_clip"] = c.grad_clip;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["pos_scale_x"] = c.pos_scale_x;
  j["pos_scale_y"] = c.pos_scale_y;
  j["seed"] = c.seed;
  return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrKind::schema, "model config: " + std::string(e.what()));
  }
  ModelConfig c;
  auto v = variant_from_name(j.value("variant", std::string("lstm_numerical")));
  if (!v) throw Error(ErrKind::schema, "unknown model variant in config");
  c.variant = *v;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.horizon = j.value("horizon", c.horizon);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.pos_scale_x = j.value("pos_scale_x", c.pos_scale_x);
  c.pos_scale_y = j.value("pos_scale_y", c.pos_scale_y);
  c.seed = j.value("seed", c.seed);
  return c;
}

Positions predict_linear(const data::TrackSet& ts, const data::Sample& s) {
  const auto& track = ts.tracks()[static_cast<std::size_t>(s.track_index)];
  if (s.anchor_index < 1 || track.frames.size() < 2)
    throw Error(ErrKind::insufficient_history,
                "constant-velocity prediction needs at least two history frames");
  const auto& anchor = ts.history_frame(s, data::kHistoryFrames - 1);
  double vx = anchor.vx, vy = anchor.vy;
  if (!std::isfinite(vx) || !std::isfinite(vy)) {
    const auto& prev = ts.history_frame(s, data::kHistoryFrames - 2);
    double dt = anchor.t - prev.t;
    vx = (anchor.x - prev.x) / dt;
    vy = (anchor.y - prev.y) / dt;
  }
  Positions out;
  double dt = ts.frame_period();
  for (int k = 1; k <= data::kFutureFrames; ++k) {
    out[static_cast<std::size_t>(k - 1)] = {vx * (k * dt), vy * (k * dt)};
  }
  return out;
}

void encode_inputs(const data::TrackSet& ts, const data::Sample& s,
                   const scene::Vocabulary* vocab, Variant variant, double radius,
                   double scale, double* out) {
  if (variant == Variant::linear)
    throw Error(ErrKind::config, "the linear baseline takes no encoded input sequence");
  if (variant == Variant::lstm_numerical) {
    for (int step = 0; step < data::kHistoryFrames; ++step) {
      const auto& f = ts.history_frame(s, step);
      out[2 * step] = f.x - s.anchor_pos[0];
      out[2 * step + 1] = f.y - s.anchor_pos[1];
    }
    return;
  }
  if (!vocab)
    throw Error(ErrKind::config,
                std::string(variant_name(variant)) + " needs a vocabulary");
  scene::EncodingVariant enc = spa_encoding(variant);
  std::size_t dim = static_cast<std::size_t>(vocab->dimension());
  for (int step = 0; step < data::kHistoryFrames; ++step) {
    scene::SceneSnapshot snap = ts.history_snapshot(s, step);
    scene::SceneVector sv;
    switch (enc) {
      case scene::EncodingVariant::power:
        sv = scene::encode_scene_power(snap, *vocab, radius, scale);
        break;
      case scene::EncodingVariant::scalar:
        sv = scene::encode_scene_scalar(snap, *vocab, radius);
        break;
      case scene::EncodingVariant::power_ego:
        if (!snap.ego)
          throw Error(ErrKind::malformed_snapshot,
                      "no ego vehicle visible at t=" + format_double(snap.timestamp));
        sv = scene::encode_scene_power_ego(snap, *vocab, radius, scale);
        break;
    }
    const double* src = sv.vec.data();
    std::copy(src, src + dim, out + static_cast<std::size_t>(step) * dim);
  }
}

EvalReport evaluate(std::span<const Positions> predictions,
                    std::span<const Positions> targets) {
  if (predictions.size() != targets.size())
    throw Error(ErrKind::dimension_mismatch, "prediction/target count mismatch");
  EvalReport r;
  r.count = predictions.size();
  if (r.count == 0) {  // empty-eval marker: reports print n/a, never zero
    r.rmse_x.fill(data::kNaN);
    r.rmse_y.fill(data::kNaN);
    r.aggregate = data::kNaN;
    return r;
  }
  std::array<double, data::kFutureFrames> sx{}, sy{};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (int k = 0; k < data::kFutureFrames; ++k) {
      auto ks = static_cast<std::size_t>(k);
      double dx = predictions[i][ks][0] - targets[i][ks][0];
      double dy = predictions[i][ks][1] - targets[i][ks][1];
      sx[ks] += dx * dx;
      sy[ks] += dy * dy;
    }
  }
  double total = 0.0;
  for (int k = 0; k < data::kFutureFrames; ++k) {
    auto ks = static_cast<std::size_t>(k);
    r.rmse_x[ks] = std::sqrt(sx[ks] / static_cast<double>(r.count));
    r.rmse_y[ks] = std::sqrt(sy[ks] / static_cast<double>(r.count));
    total += sx[ks] + sy[ks];
  }
  r.aggregate =
      std::sqrt(total / (static_cast<double>(r.count) * data::kFutureFrames));
  return r;
}

std::string eval_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["count"] = r.count;
  if (r.empty()) {
    j["rmse_x"] = "n/a";
    j["rmse_y"] = "n/a";
    j["aggregate"] = "n/a";
  } else {
    j["rmse_x"] = r.rmse_x;
    j["rmse_y"] = r.rmse_y;
    j["aggregate"] = r.aggregate;
  }
  return j.dump(2) + "\n";
}

EvalReport eval_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrKind::schema, "eval report: " + std::string(e.what()));
  }
  EvalReport r;
  r.count = j["count"].get<std::size_t>();
  if (r.count == 0) {
    r.rmse_x.fill(data::kNaN);
    r.rmse_y.fill(data::kNaN);
    r.aggregate = data::kNaN;
    return r;
  }
  for (int k = 0; k < data::kFutureFrames; ++k) {
    auto ks = static_cast<std::size_t>(k);
    r.rmse_x[ks] = j["rmse_x"][ks].get<double>();
    r.rmse_y[ks] = j["rmse_y"][ks].get<double>();
  }
  r.aggregate = j["aggregate"].get<double>();
  return r;
}

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& c,
                     const LstmWeights& w, const TrainLog& log) {
  nlohmann::json j;
  j["version"] = 1;
  j["config"] = nlohmann::json::parse(config_to_json(c));
  nlohmann::json jw;
  auto views = tensor_views(const_cast<LstmWeights&>(w));
  for (const auto& tv : views) {
    for (std::size_t i = 0; i < tv.size; ++i)
      if (!std::isfinite(tv.data[i]))
        throw Error(ErrKind::validation,
                    std::string("non-finite weight in ") + tv.name);
    jw[tv.name] = std::vector<double>(tv.data, tv.data + tv.size);
  }
  j["weights"] = std::move(jw);
  j["rng"] = {{"seed", c.seed}};
  nlohmann::json tail = nlohmann::json::array();
  std::size_t from = log.epochs.size() > 5 ? log.epochs.size() - 5 : 0;
  for (std::size_t i = from; i < log.epochs.size(); ++i) {
    const auto& e = log.epochs[i];
    nlohmann::json je;
    je["epoch"] = e.epoch;
    je["train_loss"] = e.train_loss;
    if (!std::isnan(e.val_loss)) je["val_loss"] = e.val_loss;
    tail.push_back(je);
  }
  j["log_tail"] = std::move(tail);
  write_text_file(path, j.dump() + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrKind::schema, "checkpoint: " + std::string(e.what()));
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw Error(ErrKind::schema, "unsupported checkpoint version");
  Checkpoint cp;
  cp.config = config_from_json(j["config"].dump());
  cp.weights = zero_like(cp.config);
  for (auto& tv : tensor_views(cp.weights)) {
    const auto& arr = j["weights"][tv.name];
    if (arr.size() != tv.size)
      throw Error(ErrKind::schema, std::string("checkpoint tensor '") + tv.name +
                                       "' has wrong size");
    for (std::size_t i = 0; i < tv.size; ++i) tv.data[i] = arr[i].get<double>();
  }
  return cp;
}

}  // namespace holotraj::models
