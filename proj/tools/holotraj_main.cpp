// holotraj command-line entry point: synthetic data generation, dataset
// analysis, heat-map export, model training/evaluation and the full
// experiment matrix.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "holotraj/dataset.hpp"
#include "holotraj/error.hpp"
#include "holotraj/experiments.hpp"
#include "holotraj/kernels.hpp"
#include "holotraj/models.hpp"
#include "holotraj/scene.hpp"
#include "holotraj/synth.hpp"
#include "holotraj/util.hpp"

namespace ht = holotraj;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_manifest(const fs::path& outdir, const std::string& command,
                    const json& options, const json& input_hashes,
                    const json& outputs) {
  json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["options"] = options;
  m["input_hashes"] = input_hashes;
  m["outputs"] = outputs;
  m["kernels"] = ht::kernels::active().name;
  ht::write_text_file(outdir / "manifest.json", m.dump(2) + "\n");
}

ht::data::Selector parse_selector(const std::string& name) {
  auto s = ht::data::selector_from_name(name);
  if (!s) throw ht::Error(ht::ErrKind::config, "unknown selector: " + name);
  return *s;
}

ht::data::TrackSet load_trackset(const std::string& path, const std::string& mapping,
                                 double frame_period) {
  ht::data::LoadOptions opt;
  opt.frame_period = frame_period;
  if (!mapping.empty()) opt.mapping = ht::data::ColumnMapping::from_json_file(mapping);
  return ht::data::TrackSet(ht::data::load(path, opt), frame_period);
}

// Composition preview strides anchors down to a manageable sample count; the
// reported shares are insensitive to the stride.
int preview_stride(const ht::data::TrackSet& ts) {
  std::int64_t anchors = 0;
  for (const auto& tr : ts.tracks()) {
    std::int64_t n = static_cast<std::int64_t>(tr.frames.size()) - 39;
    if (!tr.is_ego && n > 0) anchors += n;
  }
  return static_cast<int>(std::max<std::int64_t>(1, anchors / 200000));
}

struct SynthArgs {
  std::string config_path;
  std::string out = "out-synth";
  int lanes = 3;
  int vehicles = 20;
  double minutes = 1.0;
  double lc_rate = 0.5;
  double noise = 0.0;
  double speed_noise = 0.8;
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a, bool config_given, bool quiet) {
  ht::synth::HighwayConfig cfg;
  if (config_given) {
    cfg = ht::synth::HighwayConfig::from_json_file(a.config_path);
  } else {
    cfg.lanes = a.lanes;
    cfg.vehicles = a.vehicles;
    cfg.duration_s = a.minutes * 60.0;
    cfg.lane_change_rate_per_min = a.lc_rate;
    cfg.position_noise_std = a.noise;
    cfg.speed_noise_std = a.speed_noise;
    cfg.seed = a.seed;
  }
  auto tracks = ht::synth::generate(cfg);
  fs::path outdir(a.out);
  fs::create_directories(outdir);
  fs::path csv = outdir / "dataset.csv";
  ht::synth::export_object_list(tracks, csv);
  ht::write_text_file(outdir / "highway_config.json", cfg.to_json());

  std::vector<ht::data::TrackedObject> tos;
  for (const auto& tr : tracks) tos.push_back({tr.id, tr.is_ego, tr.frames});
  ht::data::TrackSet ts(std::move(tos), cfg.frame_period_s);
  auto wr = ht::data::window(ts, preview_stride(ts));
  auto report = ht::data::composition_report(wr);
  report.label = "synthetic preview";
  if (!quiet) {
    std::cout << "wrote " << csv.string() << " (" << tracks.size() << " tracks)\n";
    std::cout << ht::data::format_composition(report);
  }

  write_manifest(outdir, "synth", json::parse(cfg.to_json()), json::object(),
                 {{"dataset.csv", ht::hex64(ht::hash_file(csv))}});
  return 0;
}

int cmd_analyze(const std::string& dataset, const std::string& mapping,
                const std::string& counts, double frame_period, int stride,
                const std::string& out) {
  ht::data::CompositionReport report;
  json input_hashes = json::object();
  if (!counts.empty()) {
    report = ht::data::composition_from_counts(counts);
    input_hashes[counts] = ht::hex64(ht::hash_file(counts));
  } else {
    ht::data::LoadOptions opt;
    opt.frame_period = frame_period;
    if (!mapping.empty()) opt.mapping = ht::data::ColumnMapping::from_json_file(mapping);
    auto validation = ht::data::validate(dataset, opt);
    for (const auto& w : validation.warnings) std::cerr << "warning: " << w << "\n";
    if (!validation.ok()) {
      for (const auto& e : validation.errors) std::cerr << "error: " << e << "\n";
      return 1;
    }
    auto ts = load_trackset(dataset, mapping, frame_period);
    auto wr = ht::data::window(ts, stride);
    report = ht::data::composition_report(wr);
    input_hashes[dataset] = ht::hex64(ht::hash_file(dataset));
  }
  std::cout << ht::data::format_composition(report);
  if (!out.empty()) {
    fs::path outdir(out);
    fs::create_directories(outdir);
    ht::write_text_file(outdir / "composition.json", ht::data::composition_to_json(report));
    ht::write_text_file(outdir / "composition.txt", ht::data::format_composition(report));
    write_manifest(outdir, "analyze",
                   {{"stride", stride}, {"frame_period", frame_period}}, input_hashes,
                   {"composition.json", "composition.txt"});
  }
  return 0;
}

struct HeatmapArgs {
  std::string dataset, mapping;
  std::string out = "out-heatmap";
  std::size_t sample_index = 0;
  int history_step = ht::data::kHistoryFrames - 1;
  std::string probe = "target";
  std::string variant = "power";
  int dim = 512;
  std::uint64_t vocab_seed = 1;
  double frame_period = ht::data::kDefaultFramePeriod;
  double radius = ht::scene::kDefaultRadius;
  double scale = ht::scene::kDefaultScale;
  double step = 0.5;
  double x_min = -40, x_max = 40, y_min = -10, y_max = 10;
};

int cmd_heatmap(const HeatmapArgs& a) {
  auto ts = load_trackset(a.dataset, a.mapping, a.frame_period);
  auto wr = ht::data::window(ts, 1);
  if (a.sample_index >= wr.samples.size())
    throw ht::Error(ht::ErrKind::config,
                    "sample index " + std::to_string(a.sample_index) + " out of range (" +
                        std::to_string(wr.samples.size()) + " samples)");
  const auto& sample = wr.samples[a.sample_index];
  auto snap = ts.history_snapshot(sample, a.history_step);
  auto vocab = ht::scene::Vocabulary::create(a.dim, a.vocab_seed);

  ht::scene::SceneVector sv;
  if (a.variant == "power") {
    sv = ht::scene::encode_scene_power(snap, vocab, a.radius, a.scale);
  } else if (a.variant == "power_ego") {
    sv = ht::scene::encode_scene_power_ego(snap, vocab, a.radius, a.scale);
  } else {
    throw ht::Error(ht::ErrKind::unsupported_probe,
                    "heat maps need the power or power_ego encoding");
  }

  ht::scene::Probe probe;
  if (a.probe == "target") {
    probe.kind = ht::scene::Probe::Kind::target;
    probe.type = snap.target.type;
  } else {
    auto t = ht::scene::type_from_name(a.probe);
    if (!t) throw ht::Error(ht::ErrKind::config, "unknown probe: " + a.probe);
    probe.kind = ht::scene::Probe::Kind::others;
    probe.type = *t;
  }

  auto hm = ht::scene::heat_map(sv, vocab, probe, {a.x_min, a.x_max}, {a.y_min, a.y_max},
                                a.step);
  fs::path outdir(a.out);
  fs::create_directories(outdir);
  ht::write_text_file(outdir / "heatmap.csv", hm.to_csv());
  auto [px, py] = hm.argmax();
  std::cout << "probe " << hm.probe << ", argmax at (" << ht::format_double(px) << ", "
            << ht::format_double(py) << ")\n";
  std::cout << "wrote " << (outdir / "heatmap.csv").string() << "\n";
  write_manifest(outdir, "heatmap",
                 {{"sample_index", a.sample_index},
                  {"history_step", a.history_step},
                  {"probe", hm.probe},
                  {"variant", a.variant},
                  {"dimension", a.dim},
                  {"vocab_seed", vocab.seed()},
                  {"scale", a.scale},
                  {"radius", a.radius}},
                 {{a.dataset, ht::hex64(ht::hash_file(a.dataset))}}, {"heatmap.csv"});
  return 0;
}

struct TrainArgs {
  std::string dataset, mapping;
  std::string out = "out-train";
  std::string variant = "lstm_numerical";
  std::string selector = "all";
  int dim = 512;
  std::uint64_t vocab_seed = 1;
  int hidden = 0;  // 0 = variant default
  int epochs = 20;
  int batch = 64;
  double lr = 1e-3;
  double clip = 5.0;
  std::uint64_t seed = 1;
  double split_fraction = 0.9;
  int stride = 1;
  double frame_period = ht::data::kDefaultFramePeriod;
  double radius = ht::scene::kDefaultRadius;
  double scale = ht::scene::kDefaultScale;
  int jobs = 0;
};

ht::models::TrainData encode_set(const ht::data::TrackSet& ts,
                                 const std::vector<ht::data::Sample>& samples,
                                 const std::vector<std::size_t>& idx,
                                 const ht::scene::Vocabulary* vocab,
                                 ht::models::Variant variant, int input_dim, double radius,
                                 double scale, int jobs) {
  ht::models::TrainData td;
  td.input_dim = input_dim;
  std::size_t per = static_cast<std::size_t>(ht::data::kHistoryFrames) *
                    static_cast<std::size_t>(input_dim);
  td.inputs.resize(idx.size() * per);
  td.targets.resize(idx.size());
  ht::parallel_for(idx.size(), jobs, [&](std::size_t i) {
    ht::models::encode_inputs(ts, samples[idx[i]], vocab, variant, radius, scale,
                              td.inputs.data() + i * per);
  });
  for (std::size_t i = 0; i < idx.size(); ++i) td.targets[i] = samples[idx[i]].future;
  return td;
}

int cmd_train(const TrainArgs& a) {
  auto v = ht::models::variant_from_name(a.variant);
  if (!v) throw ht::Error(ht::ErrKind::config, "unknown variant: " + a.variant);
  if (*v == ht::models::Variant::linear)
    throw ht::Error(ht::ErrKind::config, "the linear baseline needs no training");
  auto sel = parse_selector(a.selector);

  auto ts = load_trackset(a.dataset, a.mapping, a.frame_period);
  auto wr = ht::data::window(ts, a.stride);
  auto split = ht::data::split_ids(ts, a.split_fraction, a.seed);

  ht::models::ModelConfig cfg = ht::models::ModelConfig::defaults(*v);
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.grad_clip = a.clip;
  if (a.hidden > 0) cfg.hidden = a.hidden;
  if (ht::models::is_spa(*v)) cfg.input_dim = a.dim;

  std::optional<ht::scene::Vocabulary> vocab;
  if (ht::models::is_spa(*v))
    vocab.emplace(ht::scene::Vocabulary::create(a.dim, a.vocab_seed));

  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < wr.samples.size(); ++i) {
    const auto& s = wr.samples[i];
    if (ht::data::select_subset({s}, sel).empty()) continue;
    bool in_train = std::binary_search(split.train_ids.begin(), split.train_ids.end(),
                                       s.target_id);
    (in_train ? train_idx : val_idx).push_back(i);
  }
  if (train_idx.empty()) throw ht::Error(ht::ErrKind::no_data, "empty training subset");

  int jobs = a.jobs > 0 ? a.jobs : ht::physical_cores();
  auto td = encode_set(ts, wr.samples, train_idx, vocab ? &*vocab : nullptr, *v,
                       cfg.input_dim, a.radius, a.scale, jobs);
  auto vd = encode_set(ts, wr.samples, val_idx, vocab ? &*vocab : nullptr, *v,
                       cfg.input_dim, a.radius, a.scale, jobs);

  std::string data_fp = ht::hex64(ht::hash_file(a.dataset));
  auto res = ht::models::train(cfg, td, vd, data_fp);

  fs::path outdir(a.out);
  fs::create_directories(outdir);
  ht::models::save_checkpoint(outdir / "checkpoint.json", cfg, res.weights, res.log);
  ht::write_text_file(outdir / "train_log.jsonl", res.log.to_jsonl());
  if (vocab) vocab->save(outdir / "vocabulary.json");
  const auto& last = res.log.epochs.back();
  std::cout << "trained " << a.variant << " on " << train_idx.size() << " samples, "
            << cfg.epochs << " epochs; final train loss " << last.train_loss;
  if (!std::isnan(last.val_loss)) std::cout << ", val loss " << last.val_loss;
  std::cout << "\n";
  write_manifest(outdir, "train", json::parse(ht::models::config_to_json(cfg)),
                 {{a.dataset, data_fp}}, {"checkpoint.json", "train_log.jsonl"});
  return 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string variant;  // "linear" evaluates the baseline without a checkpoint
  std::string dataset, mapping;
  std::string vocab_path;
  std::string selector = "all";
  std::string out;
  double frame_period = ht::data::kDefaultFramePeriod;
  double radius = ht::scene::kDefaultRadius;
  double scale = ht::scene::kDefaultScale;
  int stride = 1;
  int jobs = 0;
};

int cmd_eval(const EvalArgs& a) {
  auto sel = parse_selector(a.selector);
  auto ts = load_trackset(a.dataset, a.mapping, a.frame_period);
  auto wr = ht::data::window(ts, a.stride);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < wr.samples.size(); ++i)
    if (!ht::data::select_subset({wr.samples[i]}, sel).empty()) idx.push_back(i);

  std::vector<ht::models::Positions> preds(idx.size()), targets(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) targets[i] = wr.samples[idx[i]].future;

  json input_hashes = {{a.dataset, ht::hex64(ht::hash_file(a.dataset))}};
  if (a.variant == "linear") {
    for (std::size_t i = 0; i < idx.size(); ++i)
      preds[i] = ht::models::predict_linear(ts, wr.samples[idx[i]]);
  } else {
    if (a.checkpoint.empty())
      throw ht::Error(ht::ErrKind::config, "eval needs --checkpoint or --variant linear");
    auto cp = ht::models::load_checkpoint(a.checkpoint);
    input_hashes[a.checkpoint] = ht::hex64(ht::hash_file(a.checkpoint));
    std::optional<ht::scene::Vocabulary> vocab;
    if (ht::models::is_spa(cp.config.variant)) {
      if (a.vocab_path.empty())
        throw ht::Error(ht::ErrKind::config, "SPA checkpoints need --vocab");
      vocab.emplace(ht::scene::Vocabulary::load(a.vocab_path));
      if (vocab->dimension() != cp.config.input_dim)
        throw ht::Error(ht::ErrKind::config,
                        "vocabulary dimension does not match checkpoint");
    }
    int jobs = a.jobs > 0 ? a.jobs : ht::physical_cores();
    auto td = encode_set(ts, wr.samples, idx, vocab ? &*vocab : nullptr,
                         cp.config.variant, cp.config.input_dim, a.radius, a.scale, jobs);
    for (std::size_t i = 0; i < idx.size(); ++i)
      preds[i] = ht::models::predict(cp.weights, cp.config, td.input_of(i, 0));
  }

  auto er = ht::models::evaluate(preds, targets);
  if (er.empty()) {
    std::cout << "no samples matched selector '" << a.selector << "'; rmse n/a\n";
  } else {
    std::printf("%4s %8s %10s %10s\n", "step", "t_s", "rmse_x", "rmse_y");
    for (int k = 0; k < ht::data::kFutureFrames; ++k) {
      auto ks = static_cast<std::size_t>(k);
      std::printf("%4d %8.2f %10.4f %10.4f\n", k + 1, (k + 1) * a.frame_period,
                  er.rmse_x[ks], er.rmse_y[ks]);
    }
    std::printf("aggregate rmse: %.4f over %zu samples\n", er.aggregate, er.count);
  }
  if (!a.out.empty()) {
    fs::path outdir(a.out);
    fs::create_directories(outdir);
    ht::write_text_file(outdir / "eval.json", ht::models::eval_to_json(er));
    write_manifest(outdir, "eval", {{"selector", a.selector}}, input_hashes,
                   {"eval.json"});
  }
  return 0;
}

int cmd_run_matrix(const std::string& plan_path, const std::string& out, int jobs,
                   bool allow_partial) {
  auto plan = ht::experiments::ExperimentPlan::from_json_file(plan_path);
  ht::experiments::RunStats stats;
  auto report = ht::experiments::run(plan, out, jobs > 0 ? jobs : ht::physical_cores(),
                                     allow_partial, &stats);
  std::cout << "matrix complete: " << stats.cells_trained << " trained, "
            << stats.cells_reused << " reused, " << stats.cells_failed << " failed\n";
  std::cout << "report: " << (fs::path(out) / "report.json").string() << "\n";
  return 0;
}

int cmd_compare(const std::string& report_path, const std::string& metric,
                int horizon_step, const std::string& out) {
  auto report =
      ht::experiments::ComparisonReport::from_json_text(ht::read_text_file(report_path));
  auto cmp = ht::experiments::compare(report, metric, horizon_step);
  std::cout << cmp.text();
  if (!out.empty()) {
    fs::path outdir(out);
    fs::create_directories(outdir);
    ht::write_text_file(outdir / "ranking.json", cmp.to_json());
    write_manifest(outdir, "compare",
                   {{"metric", metric}, {"horizon_step", horizon_step}},
                   {{report_path, ht::hex64(ht::hash_file(report_path))}},
                   {"ranking.json"});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "holotraj: holographic scene encoding and LSTM trajectory prediction workbench"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic highway recording");
  auto* synth_cfg = synth->add_option("--config", sa.config_path, "highway config JSON");
  synth->add_option("--lanes", sa.lanes, "lane count");
  synth->add_option("--vehicles", sa.vehicles, "vehicle count (incl. ego)");
  synth->add_option("--minutes", sa.minutes, "recording length in minutes");
  synth->add_option("--lc-rate", sa.lc_rate, "lane changes per vehicle per minute");
  synth->add_option("--noise", sa.noise, "observed-position noise std (m)");
  synth->add_option("--speed-noise", sa.speed_noise, "OU speed perturbation std (m/s)");
  synth->add_option("--seed", sa.seed, "generator seed");
  synth->add_option("--out", sa.out, "output directory");

  std::string an_dataset, an_mapping, an_counts, an_out;
  double an_period = ht::data::kDefaultFramePeriod;
  int an_stride = 1;
  auto* analyze = app.add_subcommand("analyze", "dataset composition report");
  analyze->add_option("dataset", an_dataset, "object-list CSV");
  analyze->add_option("--mapping", an_mapping, "column-mapping JSON");
  analyze->add_option("--counts", an_counts, "format a precomputed counts JSON instead");
  analyze->add_option("--frame-period", an_period, "frame period in seconds");
  analyze->add_option("--stride", an_stride, "anchor stride");
  analyze->add_option("--out", an_out, "output directory (optional)");

  HeatmapArgs ha;
  auto* heatmap = app.add_subcommand("heatmap", "similarity heat map for one sample");
  heatmap->add_option("dataset", ha.dataset, "object-list CSV")->required();
  heatmap->add_option("--mapping", ha.mapping, "column-mapping JSON");
  heatmap->add_option("--sample-index", ha.sample_index, "windowed sample index");
  heatmap->add_option("--history-step", ha.history_step,
                      "history frame (0..19, 19 = anchor)");
  heatmap->add_option("--probe", ha.probe, "target | car | truck | motorcycle");
  heatmap->add_option("--variant", ha.variant, "power | power_ego");
  heatmap->add_option("--dim", ha.dim, "vector dimension");
  heatmap->add_option("--vocab-seed", ha.vocab_seed, "vocabulary seed");
  heatmap->add_option("--frame-period", ha.frame_period, "frame period (s)");
  heatmap->add_option("--radius", ha.radius, "neighbor radius (m)");
  heatmap->add_option("--scale", ha.scale, "meters per exponent unit");
  heatmap->add_option("--step", ha.step, "grid step (m)");
  heatmap->add_option("--x-min", ha.x_min, "grid x minimum (m)");
  heatmap->add_option("--x-max", ha.x_max, "grid x maximum (m)");
  heatmap->add_option("--y-min", ha.y_min, "grid y minimum (m)");
  heatmap->add_option("--y-max", ha.y_max, "grid y maximum (m)");
  heatmap->add_option("--out", ha.out, "output directory");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train one model on one subset");
  train->add_option("dataset", ta.dataset, "object-list CSV")->required();
  train->add_option("--mapping", ta.mapping, "column-mapping JSON");
  train->add_option("--variant", ta.variant, "model variant");
  train->add_option("--selector", ta.selector, "training subset selector");
  train->add_option("--dim", ta.dim, "vocabulary dimension (SPA variants)");
  train->add_option("--vocab-seed", ta.vocab_seed, "vocabulary seed");
  train->add_option("--hidden", ta.hidden, "hidden size (0 = variant default)");
  train->add_option("--epochs", ta.epochs, "epoch count");
  train->add_option("--batch", ta.batch, "batch size");
  train->add_option("--lr", ta.lr, "learning rate");
  train->add_option("--clip", ta.clip, "gradient-norm clip");
  train->add_option("--seed", ta.seed, "training/split seed");
  train->add_option("--split-fraction", ta.split_fraction, "train fraction of objects");
  train->add_option("--stride", ta.stride, "anchor stride");
  train->add_option("--frame-period", ta.frame_period, "frame period (s)");
  train->add_option("--radius", ta.radius, "scene radius (m)");
  train->add_option("--scale", ta.scale, "meters per exponent unit");
  train->add_option("--jobs", ta.jobs, "encode parallelism (0 = cores)");
  train->add_option("--out", ta.out, "output directory");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or the linear baseline");
  eval->add_option("dataset", ea.dataset, "object-list CSV")->required();
  eval->add_option("--mapping", ea.mapping, "column-mapping JSON");
  eval->add_option("--checkpoint", ea.checkpoint, "checkpoint JSON");
  eval->add_option("--variant", ea.variant, "evaluate 'linear' without a checkpoint");
  eval->add_option("--vocab", ea.vocab_path, "vocabulary JSON (SPA checkpoints)");
  eval->add_option("--selector", ea.selector, "evaluation subset selector");
  eval->add_option("--frame-period", ea.frame_period, "frame period (s)");
  eval->add_option("--radius", ea.radius, "scene radius (m)");
  eval->add_option("--scale", ea.scale, "meters per exponent unit");
  eval->add_option("--stride", ea.stride, "anchor stride");
  eval->add_option("--jobs", ea.jobs, "encode parallelism (0 = cores)");
  eval->add_option("--out", ea.out, "output directory (optional)");

  std::string rm_plan, rm_out = "out-matrix";
  int rm_jobs = 0;
  bool rm_partial = false;
  auto* run_matrix = app.add_subcommand("run-matrix", "run the full experiment matrix");
  run_matrix->add_option("--plan", rm_plan, "plan JSON")->required();
  run_matrix->add_option("--out", rm_out, "output directory");
  run_matrix->add_option("--jobs", rm_jobs, "parallel matrix cells (0 = cores)");
  run_matrix->add_flag("--allow-partial", rm_partial, "tolerate failed cells");

  std::string cp_report, cp_metric = "rmse_y", cp_out;
  int cp_step = ht::data::kFutureFrames;
  auto* compare = app.add_subcommand("compare", "rank models from a matrix report");
  compare->add_option("--report", cp_report, "report.json from run-matrix")->required();
  compare->add_option("--metric", cp_metric, "rmse_x | rmse_y | aggregate");
  compare->add_option("--horizon-step", cp_step, "1..20 (20 = 5 s)");
  compare->add_option("--out", cp_out, "output directory (optional)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(sa, synth_cfg->count() > 0, quiet);
    if (analyze->parsed()) {
      if (an_dataset.empty() && an_counts.empty()) {
        std::cerr << "error: analyze needs a dataset path or --counts\n";
        return 1;
      }
      return cmd_analyze(an_dataset, an_mapping, an_counts, an_period, an_stride, an_out);
    }
    if (heatmap->parsed()) return cmd_heatmap(ha);
    if (train->parsed()) return cmd_train(ta);
    if (eval->parsed()) return cmd_eval(ea);
    if (run_matrix->parsed()) return cmd_run_matrix(rm_plan, rm_out, rm_jobs, rm_partial);
    if (compare->parsed()) return cmd_compare(cp_report, cp_metric, cp_step, cp_out);
  } catch (const ht::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
