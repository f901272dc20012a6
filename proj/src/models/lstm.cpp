#include <chrono>
#include <cmath>

#include "holotraj/error.hpp"
#include "holotraj/kernels.hpp"
#include "holotraj/models.hpp"
#include "holotraj/rng.hpp"
#include "holotraj/util.hpp"

namespace holotraj::models {
namespace {

constexpr int kSteps = data::kHistoryFrames;  // encoder length == decoder horizon

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Orthogonal H x H block via modified Gram-Schmidt on Gaussian rows.
void orthogonal_block(double* m, std::size_t h, Rng& rng) {
  for (std::size_t i = 0; i < h * h; ++i) m[i] = rng.normal();
  for (std::size_t r = 0; r < h; ++r) {
    double* row = m + r * h;
    for (std::size_t p = 0; p < r; ++p) {
      const double* prev = m + p * h;
      double proj = kernels::active().dot(row, prev, h);
      kernels::active().axpy(-proj, prev, row, h);
    }
    double n = std::sqrt(kernels::active().dot(row, row, h));
    while (n < 1e-12) {  // degenerate draw; replace the row
      for (std::size_t i = 0; i < h; ++i) row[i] = rng.normal();
      for (std::size_t p = 0; p < r; ++p) {
        const double* prev = m + p * h;
        double proj = kernels::active().dot(row, prev, h);
        kernels::active().axpy(-proj, prev, row, h);
      }
      n = std::sqrt(kernels::active().dot(row, row, h));
    }
    kernels::active().scale(row, 1.0 / n, h);
  }
}

void uniform_fill(double* m, std::size_t n, double bound, Rng& rng) {
  for (std::size_t i = 0; i < n; ++i) m[i] = rng.uniform(-bound, bound);
}

struct Cache {
  // index 0 = initial state; enc_h[t] is the state after t steps
  std::vector<Vec> enc_h, enc_c, enc_tc, enc_gates;
  std::vector<Vec> dec_h, dec_c, dec_tc, dec_gates;
  std::vector<std::array<double, 2>> dec_u;
  std::vector<std::array<double, 2>> preds;
  Vec a, tmp4h, da, dh, dc, dh_prev, dc_prev;

  void resize(const ModelConfig& c) {
    std::size_t h = static_cast<std::size_t>(c.hidden);
    auto fit = [&](std::vector<Vec>& v, std::size_t n, std::size_t dim) {
      v.resize(n);
      for (auto& e : v) e.assign(dim, 0.0);
    };
    fit(enc_h, kSteps + 1, h);
    fit(enc_c, kSteps + 1, h);
    fit(enc_tc, kSteps + 1, h);
    fit(enc_gates, kSteps, 4 * h);
    fit(dec_h, kSteps + 1, h);
    fit(dec_c, kSteps + 1, h);
    fit(dec_tc, kSteps + 1, h);
    fit(dec_gates, kSteps, 4 * h);
    dec_u.assign(kSteps, {0.0, 0.0});
    preds.assign(kSteps, {0.0, 0.0});
    a.assign(4 * h, 0.0);
    tmp4h.assign(4 * h, 0.0);
    da.assign(4 * h, 0.0);
    dh.assign(h, 0.0);
    dc.assign(h, 0.0);
    dh_prev.assign(h, 0.0);
    dc_prev.assign(h, 0.0);
  }
};

thread_local Cache t_cache;

// One LSTM step. Gates come out activated, order [i f g o].
bool cell_forward(const Mat& wx, const Mat& wh, const Vec& b, const double* x,
                  std::size_t xdim, const Vec& h_prev, const Vec& c_prev, Vec& gates,
                  Vec& c_out, Vec& tc_out, Vec& h_out, Vec& a, Vec& tmp4h) {
  const auto& kn = kernels::active();
  std::size_t h4 = b.size();
  std::size_t h = h4 / 4;
  kn.matvec(wx.data(), h4, xdim, x, a.data());
  kn.matvec(wh.data(), h4, h, h_prev.data(), tmp4h.data());
  kn.add(a.data(), tmp4h.data(), a.data(), h4);
  kn.add(a.data(), b.data(), a.data(), h4);
  bool finite = true;
  for (std::size_t j = 0; j < h; ++j) {
    double gi = sigmoid(a[j]);
    double gf = sigmoid(a[h + j]);
    double gg = std::tanh(a[2 * h + j]);
    double go = sigmoid(a[3 * h + j]);
    gates[j] = gi;
    gates[h + j] = gf;
    gates[2 * h + j] = gg;
    gates[3 * h + j] = go;
    double cj = gf * c_prev[j] + gi * gg;
    double tcj = std::tanh(cj);
    c_out[j] = cj;
    tc_out[j] = tcj;
    h_out[j] = go * tcj;
    if (!std::isfinite(h_out[j])) finite = false;
  }
  return finite;
}

// Backward through one step. dh/dc carry the incoming state gradients and
// come back holding the previous step's. dx may be null (encoder inputs are
// constants).
void cell_backward(const Mat& wx, const Mat& wh, const Vec& gates, const Vec& c_prev,
                   const Vec& tc, const Vec& h_prev, const double* x, std::size_t xdim,
                   Vec& dh, Vec& dc, double* dx, Mat& dwx, Mat& dwh, Vec& db, Vec& da,
                   Vec& dh_prev, Vec& dc_prev) {
  const auto& kn = kernels::active();
  std::size_t h = dh.size();
  for (std::size_t j = 0; j < h; ++j) {
    double gi = gates[j], gf = gates[h + j], gg = gates[2 * h + j], go = gates[3 * h + j];
    double tcj = tc[j];
    double dct = dc[j] + dh[j] * go * (1.0 - tcj * tcj);
    da[j] = dct * gg * gi * (1.0 - gi);
    da[h + j] = dct * c_prev[j] * gf * (1.0 - gf);
    da[2 * h + j] = dct * gi * (1.0 - gg * gg);
    da[3 * h + j] = dh[j] * tcj * go * (1.0 - go);
    dc_prev[j] = dct * gf;
  }
  kn.ger(dwx.data(), 4 * h, xdim, da.data(), x);
  kn.ger(dwh.data(), 4 * h, h, da.data(), h_prev.data());
  kn.axpy(1.0, da.data(), db.data(), 4 * h);
  kn.matvec_t(wh.data(), 4 * h, h, da.data(), dh_prev.data());
  if (dx) kn.matvec_t(wx.data(), 4 * h, xdim, da.data(), dx);
  dh = dh_prev;
  dc = dc_prev;
}

// Forward pass through encoder and decoder, caching everything backward
// needs. Returns the per-sample MSE when a target is given. Positions pass
// through the pos_scale normalization in both directions; numerical encoder
// inputs are (x, y) pairs and get the same treatment.
double forward_impl(const LstmWeights& w, const ModelConfig& c, const double* inputs,
                    const Positions* target, Cache& cc) {
  cc.resize(c);
  std::size_t xdim = static_cast<std::size_t>(c.input_dim);
  const bool numeric_in = c.variant == Variant::lstm_numerical;
  std::array<double, 2> xs;
  for (int t = 1; t <= kSteps; ++t) {
    auto ts = static_cast<std::size_t>(t);
    const double* x = inputs + (ts - 1) * xdim;
    if (numeric_in) {
      xs = {x[0] / c.pos_scale_x, x[1] / c.pos_scale_y};
      x = xs.data();
    }
    bool ok = cell_forward(w.enc_wx, w.enc_wh, w.enc_b, x, xdim, cc.enc_h[ts - 1],
                           cc.enc_c[ts - 1], cc.enc_gates[ts - 1], cc.enc_c[ts],
                           cc.enc_tc[ts], cc.enc_h[ts], cc.a, cc.tmp4h);
    if (!ok)
      throw Error(ErrKind::numeric_overflow,
                  "non-finite activation at encoder step " + std::to_string(t));
  }
  // the final encoder state is the embedding handed to the decoder
  cc.dec_h[0] = cc.enc_h[kSteps];
  cc.dec_c[0] = cc.enc_c[kSteps];

  double loss = 0.0;
  std::array<double, 2> prev = {0.0, 0.0};  // anchor position in the target frame
  for (int k = 1; k <= kSteps; ++k) {
    auto ks = static_cast<std::size_t>(k);
    double p0 = prev[0] / c.pos_scale_x;
    double p1 = prev[1] / c.pos_scale_y;
    std::array<double, 2>& u = cc.dec_u[ks - 1];
    u[0] = w.in_proj_w.at(0, 0) * p0 + w.in_proj_w.at(0, 1) * p1 + w.in_proj_b[0];
    u[1] = w.in_proj_w.at(1, 0) * p0 + w.in_proj_w.at(1, 1) * p1 + w.in_proj_b[1];
    bool ok = cell_forward(w.dec_wx, w.dec_wh, w.dec_b, u.data(), 2, cc.dec_h[ks - 1],
                           cc.dec_c[ks - 1], cc.dec_gates[ks - 1], cc.dec_c[ks],
                           cc.dec_tc[ks], cc.dec_h[ks], cc.a, cc.tmp4h);
    if (!ok)
      throw Error(ErrKind::numeric_overflow,
                  "non-finite activation at decoder step " + std::to_string(k));
    std::array<double, 2>& p = cc.preds[ks - 1];
    kernels::active().matvec(w.out_w.data(), 2, static_cast<std::size_t>(c.hidden),
                             cc.dec_h[ks].data(), p.data());
    p[0] = c.pos_scale_x * (p[0] + w.out_b[0]);
    p[1] = c.pos_scale_y * (p[1] + w.out_b[1]);
    if (target) {
      double ex = p[0] - (*target)[ks - 1][0];
      double ey = p[1] - (*target)[ks - 1][1];
      loss += ex * ex + ey * ey;
    }
    prev = p;
  }
  return loss / (2.0 * kSteps);
}

void backward_impl(const LstmWeights& w, const ModelConfig& c, const double* inputs,
                   const Positions& target, LstmWeights& g, Cache& cc) {
  const auto& kn = kernels::active();
  std::size_t h = static_cast<std::size_t>(c.hidden);
  std::size_t xdim = static_cast<std::size_t>(c.input_dim);
  const bool numeric_in = c.variant == Variant::lstm_numerical;
  std::fill(cc.dh.begin(), cc.dh.end(), 0.0);
  std::fill(cc.dc.begin(), cc.dc.end(), 0.0);
  std::array<double, 2> carry = {0.0, 0.0};  // gradient into p_{k-1} via the next input
  Vec dh_add(h);
  for (int k = kSteps; k >= 1; --k) {
    auto ks = static_cast<std::size_t>(k);
    const auto& p = cc.preds[ks - 1];
    std::array<double, 2> dp = {
        (p[0] - target[ks - 1][0]) / kSteps + carry[0],
        (p[1] - target[ks - 1][1]) / kSteps + carry[1],
    };
    // p = pos_scale .* (out_w h + out_b)
    std::array<double, 2> dq = {c.pos_scale_x * dp[0], c.pos_scale_y * dp[1]};
    kn.ger(g.out_w.data(), 2, h, dq.data(), cc.dec_h[ks].data());
    g.out_b[0] += dq[0];
    g.out_b[1] += dq[1];
    kn.matvec_t(w.out_w.data(), 2, h, dq.data(), dh_add.data());
    kn.add(cc.dh.data(), dh_add.data(), cc.dh.data(), h);

    std::array<double, 2> du;
    cell_backward(w.dec_wx, w.dec_wh, cc.dec_gates[ks - 1], cc.dec_c[ks - 1],
                  cc.dec_tc[ks], cc.dec_h[ks - 1], cc.dec_u[ks - 1].data(), 2, cc.dh,
                  cc.dc, du.data(), g.dec_wx, g.dec_wh, g.dec_b, cc.da, cc.dh_prev,
                  cc.dc_prev);

    std::array<double, 2> prev =
        k >= 2 ? cc.preds[ks - 2] : std::array<double, 2>{0.0, 0.0};
    double ps0 = prev[0] / c.pos_scale_x;
    double ps1 = prev[1] / c.pos_scale_y;
    g.in_proj_w.at(0, 0) += du[0] * ps0;
    g.in_proj_w.at(0, 1) += du[0] * ps1;
    g.in_proj_w.at(1, 0) += du[1] * ps0;
    g.in_proj_w.at(1, 1) += du[1] * ps1;
    g.in_proj_b[0] += du[0];
    g.in_proj_b[1] += du[1];
    carry[0] = (w.in_proj_w.at(0, 0) * du[0] + w.in_proj_w.at(1, 0) * du[1]) / c.pos_scale_x;
    carry[1] = (w.in_proj_w.at(0, 1) * du[0] + w.in_proj_w.at(1, 1) * du[1]) / c.pos_scale_y;
  }
  // carry into p_0 = (0,0) is dropped; the decoder seed flows into the encoder
  std::array<double, 2> xs;
  for (int t = kSteps; t >= 1; --t) {
    auto ts = static_cast<std::size_t>(t);
    const double* x = inputs + (ts - 1) * xdim;
    if (numeric_in) {
      xs = {x[0] / c.pos_scale_x, x[1] / c.pos_scale_y};
      x = xs.data();
    }
    cell_backward(w.enc_wx, w.enc_wh, cc.enc_gates[ts - 1], cc.enc_c[ts - 1],
                  cc.enc_tc[ts], cc.enc_h[ts - 1], x, xdim, cc.dh, cc.dc, nullptr,
                  g.enc_wx, g.enc_wh, g.enc_b, cc.da, cc.dh_prev, cc.dc_prev);
  }
}

void zero_weights(LstmWeights& w) {
  for (auto& tv : tensor_views(w)) std::fill(tv.data, tv.data + tv.size, 0.0);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::linear: return "linear";
    case Variant::lstm_numerical: return "lstm_numerical";
    case Variant::lstm_spa1: return "lstm_spa1";
    case Variant::lstm_spa2: return "lstm_spa2";
    case Variant::lstm_spa3: return "lstm_spa3";
  }
  return "linear";
}

std::optional<Variant> variant_from_name(const std::string& name) {
  for (Variant v : {Variant::linear, Variant::lstm_numerical, Variant::lstm_spa1,
                    Variant::lstm_spa2, Variant::lstm_spa3})
    if (name == variant_name(v)) return v;
  return std::nullopt;
}

bool is_spa(Variant v) {
  return v == Variant::lstm_spa1 || v == Variant::lstm_spa2 || v == Variant::lstm_spa3;
}

scene::EncodingVariant spa_encoding(Variant v) {
  switch (v) {
    case Variant::lstm_spa1: return scene::EncodingVariant::power;
    case Variant::lstm_spa2: return scene::EncodingVariant::scalar;
    case Variant::lstm_spa3: return scene::EncodingVariant::power_ego;
    default:
      throw Error(ErrKind::config, std::string(variant_name(v)) + " has no scene encoding");
  }
}

void ModelConfig::validate() const {
  if (horizon != data::kFutureFrames)
    throw Error(ErrKind::config, "prediction horizon is fixed at 20 steps");
  if (variant == Variant::linear) return;
  if (input_dim < 2) throw Error(ErrKind::config, "input dimension must be >= 2");
  if (hidden < 1) throw Error(ErrKind::config, "hidden size must be >= 1");
  if (batch_size < 1) throw Error(ErrKind::config, "batch size must be >= 1");
  if (epochs < 0) throw Error(ErrKind::config, "negative epoch count");
  if (!(learning_rate > 0.0)) throw Error(ErrKind::config, "learning rate must be > 0");
  if (!(grad_clip > 0.0)) throw Error(ErrKind::config, "gradient clip must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0))
    throw Error(ErrKind::config, "adam betas must be in (0, 1)");
  if (!(adam_eps > 0.0)) throw Error(ErrKind::config, "adam eps must be > 0");
  if (!(pos_scale_x > 0.0 && pos_scale_y > 0.0))
    throw Error(ErrKind::config, "position scales must be > 0");
}

ModelConfig ModelConfig::defaults(Variant v) {
  ModelConfig c;
  c.variant = v;
  if (v == Variant::linear) {
    c.input_dim = 2;
    c.hidden = 0;
    c.epochs = 0;
  } else if (v == Variant::lstm_numerical) {
    c.input_dim = 2;
    c.hidden = 128;
  } else {
    c.input_dim = 512;
    c.hidden = 256;
  }
  return c;
}

std::vector<TensorView> tensor_views(LstmWeights& w) {
  return {
      {"enc_wx", w.enc_wx.data(), w.enc_wx.a.size()},
      {"enc_wh", w.enc_wh.data(), w.enc_wh.a.size()},
      {"enc_b", w.enc_b.data(), w.enc_b.size()},
      {"dec_wx", w.dec_wx.data(), w.dec_wx.a.size()},
      {"dec_wh", w.dec_wh.data(), w.dec_wh.a.size()},
      {"dec_b", w.dec_b.data(), w.dec_b.size()},
      {"in_proj_w", w.in_proj_w.data(), w.in_proj_w.a.size()},
      {"in_proj_b", w.in_proj_b.data(), w.in_proj_b.size()},
      {"out_w", w.out_w.data(), w.out_w.a.size()},
      {"out_b", w.out_b.data(), w.out_b.size()},
  };
}

LstmWeights zero_like(const ModelConfig& c) {
  std::size_t h = static_cast<std::size_t>(c.hidden);
  std::size_t i = static_cast<std::size_t>(c.input_dim);
  LstmWeights w;
  w.enc_wx = Mat(4 * h, i);
  w.enc_wh = Mat(4 * h, h);
  w.enc_b = Vec(4 * h, 0.0);
  w.dec_wx = Mat(4 * h, 2);
  w.dec_wh = Mat(4 * h, h);
  w.dec_b = Vec(4 * h, 0.0);
  w.in_proj_w = Mat(2, 2);
  w.in_proj_b = Vec(2, 0.0);
  w.out_w = Mat(2, h);
  w.out_b = Vec(2, 0.0);
  return w;
}

LstmWeights init_weights(const ModelConfig& c) {
  c.validate();
  if (c.variant == Variant::linear)
    throw Error(ErrKind::config, "the linear baseline has no weights");
  std::size_t h = static_cast<std::size_t>(c.hidden);
  LstmWeights w = zero_like(c);

  Rng r_enc_x = Rng::stream(c.seed, 11);
  uniform_fill(w.enc_wx.data(), w.enc_wx.a.size(),
               1.0 / std::sqrt(static_cast<double>(c.input_dim)), r_enc_x);
  Rng r_enc_h = Rng::stream(c.seed, 12);
  for (int block = 0; block < 4; ++block)
    orthogonal_block(w.enc_wh.data() + static_cast<std::size_t>(block) * h * h, h, r_enc_h);
  Rng r_dec_x = Rng::stream(c.seed, 13);
  uniform_fill(w.dec_wx.data(), w.dec_wx.a.size(), 1.0 / std::sqrt(2.0), r_dec_x);
  Rng r_dec_h = Rng::stream(c.seed, 14);
  for (int block = 0; block < 4; ++block)
    orthogonal_block(w.dec_wh.data() + static_cast<std::size_t>(block) * h * h, h, r_dec_h);
  // forget-gate bias starts at 1 so early training keeps its memory
  for (std::size_t j = 0; j < h; ++j) {
    w.enc_b[h + j] = 1.0;
    w.dec_b[h + j] = 1.0;
  }
  w.in_proj_w.at(0, 0) = 1.0;
  w.in_proj_w.at(1, 1) = 1.0;
  Rng r_out = Rng::stream(c.seed, 15);
  uniform_fill(w.out_w.data(), w.out_w.a.size(), 1.0 / std::sqrt(static_cast<double>(h)),
               r_out);
  return w;
}

std::string architecture_signature(const ModelConfig& c) {
  std::string s = "encoder:lstm(h=" + std::to_string(c.hidden) + ")";
  s += ";decoder:lstm(h=" + std::to_string(c.hidden) + ",in=2)";
  s += ";in_proj:2x2;out_proj:2x" + std::to_string(c.hidden);
  s += ";horizon=" + std::to_string(c.horizon);
  return s;
}

Positions predict(const LstmWeights& w, const ModelConfig& c, const double* inputs) {
  forward_impl(w, c, inputs, nullptr, t_cache);
  Positions out;
  for (std::size_t k = 0; k < static_cast<std::size_t>(kSteps); ++k)
    out[k] = t_cache.preds[k];
  return out;
}

double sample_loss(const LstmWeights& w, const ModelConfig& c, const double* inputs,
                   const Positions& target) {
  return forward_impl(w, c, inputs, &target, t_cache);
}

double loss_and_gradients(const LstmWeights& w, const ModelConfig& c, const double* inputs,
                          const Positions& target, LstmWeights& grad) {
  double loss = forward_impl(w, c, inputs, &target, t_cache);
  backward_impl(w, c, inputs, target, grad, t_cache);
  return loss;
}

std::string TrainLog::to_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    out += "{\"epoch\":" + std::to_string(e.epoch);
    out += ",\"train_loss\":" + format_double(e.train_loss);
    out += ",\"val_loss\":" +
           (std::isnan(e.val_loss) ? std::string("null") : format_double(e.val_loss));
    out += ",\"wall_s\":" + format_double(e.wall_s);
    out += ",\"seed\":" + std::to_string(seed);
    out += ",\"config_hash\":\"" + config_hash + "\"";
    out += ",\"data\":\"" + data_fingerprint + "\"}\n";
  }
  return out;
}

TrainResult train(const ModelConfig& c, const TrainData& train_set,
                  const TrainData& val_set, const std::string& data_fingerprint) {
  c.validate();
  if (c.variant == Variant::linear)
    throw Error(ErrKind::config, "the linear baseline is not trained");
  if (train_set.count() == 0) throw Error(ErrKind::no_data, "empty training set");
  if (train_set.input_dim != c.input_dim)
    throw Error(ErrKind::config, "training data dimension does not match the model");
  if (val_set.count() > 0 && val_set.input_dim != c.input_dim)
    throw Error(ErrKind::config, "validation data dimension does not match the model");

  TrainResult res;
  res.weights = init_weights(c);
  res.log.seed = c.seed;
  res.log.config_hash = hex64(fnv1a(config_to_json(c)));
  res.log.data_fingerprint = data_fingerprint;

  LstmWeights grad = zero_like(c);
  LstmWeights adam_m = zero_like(c);
  LstmWeights adam_v = zero_like(c);
  auto wviews = tensor_views(res.weights);
  auto gviews = tensor_views(grad);
  auto mviews = tensor_views(adam_m);
  auto vviews = tensor_views(adam_v);

  std::vector<std::size_t> order(train_set.count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t n = train_set.count();
  const std::size_t batch = static_cast<std::size_t>(c.batch_size);
  std::int64_t adam_t = 0;

  for (int epoch = 1; epoch <= c.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng = Rng::stream(c.seed, 1000 + static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      std::size_t bsize = std::min(batch, n - start);
      zero_weights(grad);
      for (std::size_t b = 0; b < bsize; ++b) {
        std::size_t s = order[start + b];
        loss_sum += loss_and_gradients(res.weights, c, train_set.input_of(s, 0),
                                       train_set.targets[s], grad);
      }
      double inv_b = 1.0 / static_cast<double>(bsize);
      double norm_sq = 0.0;
      for (auto& tv : gviews) {
        kernels::active().scale(tv.data, inv_b, tv.size);
        norm_sq += kernels::active().dot(tv.data, tv.data, tv.size);
      }
      double gnorm = std::sqrt(norm_sq);
      if (gnorm > c.grad_clip) {
        double sc = c.grad_clip / gnorm;
        for (auto& tv : gviews) kernels::active().scale(tv.data, sc, tv.size);
      }
      ++adam_t;
      double bc1 = 1.0 - std::pow(c.adam_beta1, static_cast<double>(adam_t));
      double bc2 = 1.0 - std::pow(c.adam_beta2, static_cast<double>(adam_t));
      for (std::size_t ti = 0; ti < gviews.size(); ++ti) {
        double* g = gviews[ti].data;
        double* m = mviews[ti].data;
        double* v = vviews[ti].data;
        double* p = wviews[ti].data;
        for (std::size_t i = 0; i < gviews[ti].size; ++i) {
          m[i] = c.adam_beta1 * m[i] + (1.0 - c.adam_beta1) * g[i];
          v[i] = c.adam_beta2 * v[i] + (1.0 - c.adam_beta2) * g[i] * g[i];
          p[i] -= c.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + c.adam_eps);
        }
      }
    }

    EpochLog el;
    el.epoch = epoch;
    el.train_loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(el.train_loss))
      throw Error(ErrKind::training_diverged,
                  "training loss became non-finite at epoch " + std::to_string(epoch));
    if (val_set.count() > 0) {
      double vl = 0.0;
      for (std::size_t s = 0; s < val_set.count(); ++s)
        vl += sample_loss(res.weights, c, val_set.input_of(s, 0), val_set.targets[s]);
      el.val_loss = vl / static_cast<double>(val_set.count());
    } else {
      el.val_loss = data::kNaN;
    }
    el.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.log.epochs.push_back(el);
  }
  return res;
}

}  // namespace holotraj::models
