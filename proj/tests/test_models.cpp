#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "holotraj/error.hpp"
#include "holotraj/models.hpp"
#include "holotraj/rng.hpp"
#include "holotraj/synth.hpp"
#include "holotraj/util.hpp"

using namespace holotraj;
using models::ModelConfig;
using models::Positions;
using models::TrainData;
using models::Variant;

namespace {

ModelConfig toy_config(Variant v, int input_dim) {
  ModelConfig c = ModelConfig::defaults(v);
  c.input_dim = input_dim;
  c.hidden = 8;
  c.seed = 3;
  return c;
}

// Random toy problem (3 samples) with inputs on the scale the variant sees.
TrainData toy_data(const ModelConfig& c, std::uint64_t seed) {
  TrainData td;
  td.input_dim = c.input_dim;
  Rng rng(seed);
  std::size_t n = 3;
  td.inputs.resize(n * 20 * static_cast<std::size_t>(c.input_dim));
  for (auto& x : td.inputs)
    x = c.variant == Variant::lstm_numerical ? rng.uniform(-120.0, 10.0)
                                             : rng.normal();
  td.targets.resize(n);
  for (auto& t : td.targets)
    for (auto& p : t) p = {rng.uniform(-50.0, 50.0), rng.uniform(-4.0, 4.0)};
  return td;
}

double batch_loss(const models::LstmWeights& w, const ModelConfig& c, const TrainData& td) {
  double sum = 0.0;
  for (std::size_t s = 0; s < td.count(); ++s)
    sum += models::sample_loss(w, c, td.input_of(s, 0), td.targets[s]);
  return sum / static_cast<double>(td.count());
}

// Central finite differences over every parameter; the independent oracle for
// the analytic BPTT gradients.
double max_gradient_error(const ModelConfig& c) {
  TrainData td = toy_data(c, 17);
  models::LstmWeights w = models::init_weights(c);
  models::LstmWeights g = models::zero_like(c);
  for (std::size_t s = 0; s < td.count(); ++s)
    models::loss_and_gradients(w, c, td.input_of(s, 0), td.targets[s], g);
  for (auto& tv : models::tensor_views(g))
    for (std::size_t i = 0; i < tv.size; ++i) tv.data[i] /= double(td.count());

  const double eps = 1e-6;
  double worst = 0.0;
  auto wviews = models::tensor_views(w);
  auto gviews = models::tensor_views(g);
  for (std::size_t t = 0; t < wviews.size(); ++t) {
    for (std::size_t i = 0; i < wviews[t].size; ++i) {
      double saved = wviews[t].data[i];
      wviews[t].data[i] = saved + eps;
      double lp = batch_loss(w, c, td);
      wviews[t].data[i] = saved - eps;
      double lm = batch_loss(w, c, td);
      wviews[t].data[i] = saved;
      double fd = (lp - lm) / (2.0 * eps);
      double an = gviews[t].data[i];
      double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences for every variant") {
  CHECK(max_gradient_error(toy_config(Variant::lstm_numerical, 2)) < 1e-4);
  CHECK(max_gradient_error(toy_config(Variant::lstm_spa1, 16)) < 1e-4);
  CHECK(max_gradient_error(toy_config(Variant::lstm_spa2, 16)) < 1e-4);
  CHECK(max_gradient_error(toy_config(Variant::lstm_spa3, 16)) < 1e-4);
}

TEST_CASE("all variants share the same architecture apart from the input") {
  auto sig = [](Variant v, int dim) {
    ModelConfig c = ModelConfig::defaults(v);
    c.input_dim = dim;
    c.hidden = 32;
    return models::architecture_signature(c);
  };
  std::string ref = sig(Variant::lstm_numerical, 2);
  CHECK(ref == sig(Variant::lstm_spa1, 512));
  CHECK(ref == sig(Variant::lstm_spa2, 512));
  CHECK(ref == sig(Variant::lstm_spa3, 128));
}

TEST_CASE("zero weights collapse predictions to the output bias") {
  ModelConfig c = toy_config(Variant::lstm_numerical, 2);
  models::LstmWeights w = models::zero_like(c);
  w.out_b = {0.5, -0.25};
  TrainData td = toy_data(c, 5);
  Positions p = models::predict(w, c, td.input_of(0, 0));
  for (const auto& step : p) {
    CHECK(step[0] == c.pos_scale_x * 0.5);
    CHECK(step[1] == c.pos_scale_y * -0.25);
  }
}

TEST_CASE("forward and training are bitwise deterministic") {
  ModelConfig c = toy_config(Variant::lstm_numerical, 2);
  c.epochs = 3;
  c.batch_size = 2;
  TrainData td = toy_data(c, 23);
  auto r1 = models::train(c, td, td);
  auto r2 = models::train(c, td, td);
  auto v1 = models::tensor_views(r1.weights);
  auto v2 = models::tensor_views(r2.weights);
  for (std::size_t t = 0; t < v1.size(); ++t)
    for (std::size_t i = 0; i < v1[t].size; ++i) CHECK(v1[t].data[i] == v2[t].data[i]);
  REQUIRE(r1.log.epochs.size() == 3);
  CHECK(r1.log.epochs[2].train_loss == r2.log.epochs[2].train_loss);

  Positions p1 = models::predict(r1.weights, c, td.input_of(1, 0));
  Positions p2 = models::predict(r2.weights, c, td.input_of(1, 0));
  for (int k = 0; k < 20; ++k) {
    auto ks = static_cast<std::size_t>(k);
    CHECK(p1[ks][0] == p2[ks][0]);
    CHECK(p1[ks][1] == p2[ks][1]);
  }
}

TEST_CASE("training errors") {
  ModelConfig c = toy_config(Variant::lstm_numerical, 2);
  TrainData empty;
  empty.input_dim = 2;
  CHECK_THROWS_AS(models::train(c, empty, empty), Error);
  try {
    models::train(c, empty, empty);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::no_data);
  }
  ModelConfig linear = ModelConfig::defaults(Variant::linear);
  CHECK_THROWS_AS(models::train(linear, toy_data(c, 1), empty), Error);
  ModelConfig bad = c;
  bad.horizon = 10;
  CHECK_THROWS_AS(bad.validate(), Error);
}

namespace {

// Noise-free constant-speed highway: the exactly learnable smoke problem.
data::TrackSet constant_velocity_trackset(int vehicles, double minutes) {
  synth::HighwayConfig cfg;
  cfg.lanes = 3;
  cfg.vehicles = vehicles;
  cfg.duration_s = minutes * 60.0;
  cfg.lane_change_rate_per_min = 0.0;
  cfg.position_noise_std = 0.0;
  cfg.speed_noise_std = 0.0;
  cfg.seed = 11;
  auto tracks = synth::generate(cfg);
  std::vector<data::TrackedObject> tos;
  for (const auto& tr : tracks) tos.push_back({tr.id, tr.is_ego, tr.frames});
  return data::TrackSet(std::move(tos), cfg.frame_period_s);
}

}  // namespace

TEST_CASE("linear baseline examples") {
  // hand-built constant-velocity sample: v = (20, 0) m/s
  std::vector<data::TrackedObject> tracks;
  data::TrackedObject tr;
  tr.id = 1;
  for (int k = 0; k < 40; ++k) {
    data::ObjectFrame f;
    f.t = k * 0.25;
    f.id = 1;
    f.x = 20.0 * f.t;
    f.y = 0.0;
    f.vx = 20.0;
    f.vy = 0.0;
    f.lane = 1;
    f.lane_known = true;
    tr.frames.push_back(f);
  }
  tracks.push_back(tr);
  data::TrackSet ts(std::move(tracks), 0.25);
  auto wr = data::window(ts);
  REQUIRE(wr.samples.size() == 1);
  Positions p = models::predict_linear(ts, wr.samples[0]);
  CHECK(p[19][0] == doctest::Approx(100.0));  // 20 m/s for 5 s
  CHECK(p[19][1] == 0.0);
  CHECK(p[0][0] == doctest::Approx(5.0));

  // stationary target predicts staying put
  std::vector<data::TrackedObject> still{};
  data::TrackedObject st;
  st.id = 2;
  for (int k = 0; k < 40; ++k) {
    data::ObjectFrame f;
    f.t = k * 0.25;
    f.id = 2;
    f.x = 7.0;
    f.y = 3.5;
    f.vx = 0.0;
    f.vy = 0.0;
    f.lane = 1;
    f.lane_known = true;
    st.frames.push_back(f);
  }
  still.push_back(st);
  data::TrackSet ts2(std::move(still), 0.25);
  auto wr2 = data::window(ts2);
  Positions p2 = models::predict_linear(ts2, wr2.samples[0]);
  for (const auto& step : p2) {
    CHECK(step[0] == 0.0);
    CHECK(step[1] == 0.0);
  }
}

TEST_CASE("linear baseline is exact on noise-free constant-velocity data") {
  auto ts = constant_velocity_trackset(8, 0.5);
  auto wr = data::window(ts, 4);
  REQUIRE(wr.samples.size() > 20);
  std::vector<Positions> preds, targets;
  for (const auto& s : wr.samples) {
    preds.push_back(models::predict_linear(ts, s));
    targets.push_back(s.future);
  }
  auto er = models::evaluate(preds, targets);
  for (int k = 0; k < 20; ++k) {
    auto ks = static_cast<std::size_t>(k);
    CHECK(er.rmse_x[ks] < 1e-9);
    CHECK(er.rmse_y[ks] < 1e-9);
  }
}

TEST_CASE("lstm_numerical learns the constant-velocity task") {
  auto ts = constant_velocity_trackset(10, 1.0);
  auto wr = data::window(ts, 8);
  ModelConfig c = ModelConfig::defaults(Variant::lstm_numerical);
  c.hidden = 24;
  c.epochs = 60;
  c.batch_size = 32;
  c.seed = 1;

  TrainData td;
  td.input_dim = 2;
  td.inputs.resize(wr.samples.size() * 40);
  td.targets.resize(wr.samples.size());
  for (std::size_t i = 0; i < wr.samples.size(); ++i) {
    models::encode_inputs(ts, wr.samples[i], nullptr, Variant::lstm_numerical, 40.0, 1.0,
                          td.inputs.data() + i * 40);
    td.targets[i] = wr.samples[i].future;
  }
  auto res = models::train(c, td, TrainData{2, {}, {}});
  CHECK(res.log.epochs.back().train_loss < res.log.epochs.front().train_loss);

  std::vector<Positions> preds, targets;
  for (std::size_t i = 0; i < td.count(); ++i) {
    preds.push_back(models::predict(res.weights, c, td.input_of(i, 0)));
    targets.push_back(td.targets[i]);
  }
  auto er = models::evaluate(preds, targets);
  CHECK(er.rmse_x[19] < 0.5);
  CHECK(er.rmse_y[19] < 0.5);
}

TEST_CASE("evaluate") {
  std::vector<Positions> targets(4);
  Rng rng(9);
  for (auto& t : targets)
    for (auto& p : t) p = {rng.normal(), rng.normal()};

  auto er = models::evaluate(targets, targets);  // perfect predictor
  for (int k = 0; k < 20; ++k) {
    CHECK(er.rmse_x[static_cast<std::size_t>(k)] == 0.0);
    CHECK(er.rmse_y[static_cast<std::size_t>(k)] == 0.0);
  }
  CHECK(er.aggregate == 0.0);

  // order invariance
  std::vector<Positions> preds = targets;
  preds[0][5][0] += 1.0;
  auto e1 = models::evaluate(preds, targets);
  std::swap(preds[0], preds[3]);
  std::vector<Positions> t2 = targets;
  std::swap(t2[0], t2[3]);
  auto e2 = models::evaluate(preds, t2);
  CHECK(e1.rmse_x[5] == doctest::Approx(e2.rmse_x[5]).epsilon(1e-15));

  // empty marker
  auto e3 = models::evaluate({}, {});
  CHECK(e3.empty());
  CHECK(std::isnan(e3.aggregate));
  std::string json = models::eval_to_json(e3);
  CHECK(json.find("n/a") != std::string::npos);
}

TEST_CASE("checkpoint round trip is bitwise") {
  ModelConfig c = toy_config(Variant::lstm_spa2, 16);
  c.epochs = 2;
  TrainData td = toy_data(c, 31);
  auto res = models::train(c, td, TrainData{16, {}, {}});
  auto path = std::filesystem::temp_directory_path() / "holotraj_ckpt_test.json";
  models::save_checkpoint(path, c, res.weights, res.log);
  auto cp = models::load_checkpoint(path);
  CHECK(cp.config.variant == Variant::lstm_spa2);
  CHECK(cp.config.hidden == c.hidden);
  auto v1 = models::tensor_views(res.weights);
  auto v2 = models::tensor_views(cp.weights);
  for (std::size_t t = 0; t < v1.size(); ++t)
    for (std::size_t i = 0; i < v1[t].size; ++i) CHECK(v1[t].data[i] == v2[t].data[i]);
  std::filesystem::remove(path);
}

TEST_CASE("spa input encodings differ by exactly the ego term") {
  synth::HighwayConfig cfg;
  cfg.lanes = 3;
  cfg.vehicles = 6;
  cfg.duration_s = 20.0;
  cfg.lane_change_rate_per_min = 0.0;
  cfg.seed = 2;
  auto gen = synth::generate(cfg);
  std::vector<data::TrackedObject> tos;
  for (const auto& tr : gen) tos.push_back({tr.id, tr.is_ego, tr.frames});
  data::TrackSet ts(std::move(tos), cfg.frame_period_s);
  auto wr = data::window(ts, 10);
  REQUIRE(!wr.samples.empty());
  auto vocab = scene::Vocabulary::create(64, 4);

  std::vector<double> spa1(20 * 64), spa3(20 * 64);
  models::encode_inputs(ts, wr.samples[0], &vocab, Variant::lstm_spa1, 40.0, 1.0,
                        spa1.data());
  models::encode_inputs(ts, wr.samples[0], &vocab, Variant::lstm_spa3, 40.0, 1.0,
                        spa3.data());
  for (int step = 0; step < 20; ++step) {
    auto snap = ts.history_snapshot(wr.samples[0], step);
    REQUIRE(snap.ego.has_value());
    auto ego_term = hrr::bind(
        vocab.ego_marker(), hrr::bind(hrr::power(vocab.axis_x(), (*snap.ego)[0]),
                                      hrr::power(vocab.axis_y(), (*snap.ego)[1])));
    for (int d = 0; d < 64; ++d) {
      double diff = spa3[static_cast<std::size_t>(step * 64 + d)] -
                    spa1[static_cast<std::size_t>(step * 64 + d)];
      CHECK(diff == doctest::Approx(ego_term[d]).epsilon(1e-9));
    }
  }

  // numerical encoding: last history step sits at the anchor origin
  std::vector<double> num(40);
  models::encode_inputs(ts, wr.samples[0], nullptr, Variant::lstm_numerical, 40.0, 1.0,
                        num.data());
  CHECK(num[38] == 0.0);
  CHECK(num[39] == 0.0);

  // vocabulary mismatch is rejected
  CHECK_THROWS_AS(models::encode_inputs(ts, wr.samples[0], nullptr, Variant::lstm_spa1,
                                        40.0, 1.0, spa1.data()),
                  Error);
}
