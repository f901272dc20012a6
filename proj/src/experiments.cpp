#include "holotraj/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include <json.hpp>

#include "holotraj/error.hpp"
#include "holotraj/synth.hpp"
#include "holotraj/util.hpp"

namespace holotraj::experiments {
namespace {

using nlohmann::json;

models::ModelConfig parse_model_entry(const json& entry, const json& training_defaults,
                                      int vocab_dimension) {
  std::string name = entry.is_string() ? entry.get<std::string>()
                                       : entry.value("variant", std::string());
  auto variant = models::variant_from_name(name);
  if (!variant) throw Error(ErrKind::config, "unknown model variant: " + name);
  models::ModelConfig c = models::ModelConfig::defaults(*variant);
  if (models::is_spa(*variant)) c.input_dim = vocab_dimension;

  auto apply = [&](const json& j) {
    if (j.contains("hidden")) c.hidden = j["hidden"].get<int>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("grad_clip")) c.grad_clip = j["grad_clip"].get<double>();
  };
  if (!training_defaults.is_null()) apply(training_defaults);
  if (entry.is_object()) apply(entry);
  return c;
}

std::vector<data::Selector> parse_selectors(const json& arr, const char* what) {
  std::vector<data::Selector> out;
  for (const auto& e : arr) {
    auto s = data::selector_from_name(e.get<std::string>());
    if (!s) throw Error(ErrKind::config,
                        std::string("unknown ") + what + " selector: " + e.get<std::string>());
    out.push_back(*s);
  }
  return out;
}

// Master-sample index selection mirroring data::select_subset.
bool sample_matches(const data::Sample& s, data::Selector sel) {
  switch (sel) {
    case data::Selector::all: return true;
    case data::Selector::lane_change_any: return s.lane_change_past || s.lane_change_future;
    case data::Selector::lane_change_future: return s.lane_change_future;
    case data::Selector::crowded: return s.crowd_label_ok && s.crowded;
    case data::Selector::crowded_and_lane_change:
      return s.crowd_label_ok && s.crowded && (s.lane_change_past || s.lane_change_future);
  }
  return false;
}

std::vector<std::size_t> select_indices(const std::vector<data::Sample>& samples,
                                        std::span<const std::int64_t> sorted_ids,
                                        data::Selector sel) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::binary_search(sorted_ids.begin(), sorted_ids.end(), samples[i].target_id))
      continue;
    if (sample_matches(samples[i], sel)) out.push_back(i);
  }
  return out;
}

// Per-variant encoded inputs for every sample, shared by all cells.
struct InputCache {
  int input_dim = 0;
  std::vector<double> flat;  // [sample][20][dim]

  const double* of(std::size_t sample) const {
    return flat.data() + sample * static_cast<std::size_t>(data::kHistoryFrames) *
                             static_cast<std::size_t>(input_dim);
  }
};

std::string selector_str(data::Selector s) { return data::selector_name(s); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? data::kNaN : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.empty()) return data::kNaN;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

json row_to_json(const ResultRow& r) {
  json j;
  j["model"] = r.model;
  j["train_selector"] = r.train_selector;
  j["eval_selector"] = r.eval_selector;
  j["setup"] = r.setup;
  j["seeds_used"] = r.seeds_used;
  j["eval_counts"] = r.eval_counts;
  j["empty"] = r.empty;
  if (!r.empty) {
    j["rmse_x_mean"] = r.rmse_x_mean;
    j["rmse_x_std"] = r.rmse_x_std;
    j["rmse_y_mean"] = r.rmse_y_mean;
    j["rmse_y_std"] = r.rmse_y_std;
    j["aggregate_mean"] = r.aggregate_mean;
    j["aggregate_std"] = r.aggregate_std;
  }
  return j;
}

ResultRow row_from_json(const json& j) {
  ResultRow r;
  r.model = j["model"].get<std::string>();
  r.train_selector = j["train_selector"].get<std::string>();
  r.eval_selector = j["eval_selector"].get<std::string>();
  r.setup = j["setup"].get<std::string>();
  r.seeds_used = j["seeds_used"].get<std::vector<std::uint64_t>>();
  r.eval_counts = j["eval_counts"].get<std::vector<std::size_t>>();
  r.empty = j["empty"].get<bool>();
  if (!r.empty) {
    for (int k = 0; k < data::kFutureFrames; ++k) {
      auto ks = static_cast<std::size_t>(k);
      r.rmse_x_mean[ks] = j["rmse_x_mean"][ks].get<double>();
      r.rmse_x_std[ks] = j["rmse_x_std"][ks].get<double>();
      r.rmse_y_mean[ks] = j["rmse_y_mean"][ks].get<double>();
      r.rmse_y_std[ks] = j["rmse_y_std"][ks].get<double>();
    }
    r.aggregate_mean = j["aggregate_mean"].get<double>();
    r.aggregate_std = j["aggregate_std"].get<double>();
  }
  return r;
}

}  // namespace

ExperimentPlan ExperimentPlan::from_json_file(const std::filesystem::path& path) {
  return from_json_text(read_text_file(path));
}

ExperimentPlan ExperimentPlan::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrKind::config, "plan file: " + std::string(e.what()));
  }
  ExperimentPlan p;
  if (j.contains("datasets"))
    p.datasets = j["datasets"].get<std::vector<std::string>>();
  else if (j.contains("dataset"))
    p.datasets = {j["dataset"].get<std::string>()};
  if (j.contains("mapping")) p.mapping = j["mapping"].get<std::string>();
  p.frame_period = j.value("frame_period", p.frame_period);
  p.anchor_stride = j.value("anchor_stride", p.anchor_stride);
  if (j.contains("vocabulary")) {
    p.vocab_dimension = j["vocabulary"].value("dimension", p.vocab_dimension);
    p.vocab_seed = j["vocabulary"].value("seed", p.vocab_seed);
  }
  if (j.contains("scene")) {
    p.radius = j["scene"].value("radius", p.radius);
    p.scale = j["scene"].value("scale", p.scale);
  }
  p.split_fraction = j.value("split_fraction", p.split_fraction);
  if (j.contains("seeds")) p.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("train_selectors"))
    p.train_selectors = parse_selectors(j["train_selectors"], "train");
  if (j.contains("eval_selectors"))
    p.eval_selectors = parse_selectors(j["eval_selectors"], "eval");
  p.allow_extended_selectors = j.value("allow_extended_selectors", false);
  json training = j.contains("training") ? j["training"] : json();
  if (!j.contains("models")) throw Error(ErrKind::config, "plan lists no models");
  for (const auto& entry : j["models"])
    p.model_configs.push_back(parse_model_entry(entry, training, p.vocab_dimension));
  p.validate();
  return p;
}

std::string ExperimentPlan::to_json() const {
  json j;
  j["version"] = 1;
  j["datasets"] = datasets;
  if (mapping) j["mapping"] = *mapping;
  j["frame_period"] = frame_period;
  j["anchor_stride"] = anchor_stride;
  j["vocabulary"] = {{"dimension", vocab_dimension}, {"seed", vocab_seed}};
  j["scene"] = {{"radius", radius}, {"scale", scale}};
  j["split_fraction"] = split_fraction;
  j["seeds"] = seeds;
  json ts = json::array(), es = json::array();
  for (auto s : train_selectors) ts.push_back(selector_str(s));
  for (auto s : eval_selectors) es.push_back(selector_str(s));
  j["train_selectors"] = ts;
  j["eval_selectors"] = es;
  j["allow_extended_selectors"] = allow_extended_selectors;
  json ms = json::array();
  for (const auto& m : model_configs) ms.push_back(json::parse(models::config_to_json(m)));
  j["models"] = ms;
  return j.dump(2) + "\n";
}

void ExperimentPlan::validate() const {
  if (datasets.empty()) throw Error(ErrKind::config, "plan needs at least one dataset");
  if (model_configs.empty()) throw Error(ErrKind::config, "plan lists no models");
  if (seeds.empty()) throw Error(ErrKind::config, "plan needs at least one seed");
  if (train_selectors.empty() || eval_selectors.empty())
    throw Error(ErrKind::config, "plan needs train and eval selectors");
  if (anchor_stride < 1) throw Error(ErrKind::config, "anchor stride must be >= 1");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw Error(ErrKind::config, "split fraction must be in (0, 1)");
  if (!allow_extended_selectors) {
    for (auto t : train_selectors)
      for (auto e : eval_selectors)
        if (setup_id(t, e) == "x")
          throw Error(ErrKind::config,
                      std::string("selector pair (") + data::selector_name(t) + ", " +
                          data::selector_name(e) +
                          ") is outside the standard matrix; set "
                          "allow_extended_selectors to run it");
  }
  bool any_spa = false;
  for (const auto& m : model_configs) {
    m.validate();
    if (models::is_spa(m.variant)) {
      any_spa = true;
      if (m.input_dim != vocab_dimension)
        throw Error(ErrKind::config, "SPA model input dimension must match the vocabulary");
    }
  }
  if (any_spa && vocab_dimension < 2)
    throw Error(ErrKind::config, "vocabulary dimension must be >= 2");
}

std::string setup_id(data::Selector train_sel, data::Selector eval_sel) {
  using S = data::Selector;
  if (train_sel == S::all) {
    if (eval_sel == S::all) return "a";
    if (eval_sel == S::lane_change_any) return "c";
    if (eval_sel == S::crowded) return "e";
    if (eval_sel == S::crowded_and_lane_change) return "g";
  } else if (train_sel == S::lane_change_any) {
    if (eval_sel == S::all) return "b";
    if (eval_sel == S::lane_change_any) return "d";
    if (eval_sel == S::crowded) return "f";
    if (eval_sel == S::crowded_and_lane_change) return "h";
  }
  return "x";
}

const ResultRow* ComparisonReport::find(const std::string& model,
                                        const std::string& train_sel,
                                        const std::string& eval_sel) const {
  for (const auto& r : rows)
    if (r.model == model && r.train_selector == train_sel && r.eval_selector == eval_sel)
      return &r;
  return nullptr;
}

std::string ComparisonReport::to_json() const {
  json j;
  j["version"] = 1;
  j["plan_hash"] = plan_hash;
  j["data_fingerprint"] = data_fingerprint;
  j["vocabulary"] = {{"dimension", vocab_dimension}, {"seed", vocab_seed}};
  j["seeds"] = seeds;
  json jc = json::array();
  for (const auto& c : cells) {
    jc.push_back({{"model", c.model},
                  {"train_selector", c.train_selector},
                  {"seed", c.seed},
                  {"hash", c.hash},
                  {"status", c.status},
                  {"train_samples", c.train_samples}});
  }
  j["cells"] = std::move(jc);
  json jr = json::array();
  for (const auto& r : rows) jr.push_back(row_to_json(r));
  j["results"] = std::move(jr);
  return j.dump(2) + "\n";
}

ComparisonReport ComparisonReport::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrKind::schema, "comparison report: " + std::string(e.what()));
  }
  ComparisonReport rep;
  rep.plan_hash = j.value("plan_hash", std::string());
  rep.data_fingerprint = j.value("data_fingerprint", std::string());
  if (j.contains("vocabulary")) {
    rep.vocab_dimension = j["vocabulary"].value("dimension", 0);
    rep.vocab_seed = j["vocabulary"].value("seed", std::uint64_t(0));
  }
  if (j.contains("seeds")) rep.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("cells")) {
    for (const auto& e : j["cells"]) {
      CellInfo c;
      c.model = e["model"].get<std::string>();
      c.train_selector = e["train_selector"].get<std::string>();
      c.seed = e["seed"].get<std::uint64_t>();
      c.hash = e.value("hash", std::string());
      c.status = e.value("status", std::string("ok"));
      c.train_samples = e.value("train_samples", std::size_t(0));
      rep.cells.push_back(std::move(c));
    }
  }
  for (const auto& e : j["results"]) rep.rows.push_back(row_from_json(e));
  return rep;
}

ComparisonReport run(const ExperimentPlan& plan, const std::filesystem::path& outdir,
                     int jobs, bool allow_partial, RunStats* stats) {
  plan.validate();
  std::filesystem::create_directories(outdir / "cells");
  std::filesystem::create_directories(outdir / "curves");

  // Load and merge datasets; ids from different files get disjoint ranges.
  std::vector<data::TrackedObject> tracks;
  std::uint64_t data_hash = 0xcbf29ce484222325ull;
  for (std::size_t fi = 0; fi < plan.datasets.size(); ++fi) {
    data::LoadOptions opt;
    opt.frame_period = plan.frame_period;
    if (plan.mapping) opt.mapping = data::ColumnMapping::from_json_file(*plan.mapping);
    auto part = data::load(plan.datasets[fi], opt);
    std::int64_t offset = static_cast<std::int64_t>(fi) * 1000000000ll;
    for (auto& tr : part) {
      tr.id += offset;
      for (auto& f : tr.frames) f.id += offset;
      tracks.push_back(std::move(tr));
    }
    data_hash = fnv1a(read_text_file(plan.datasets[fi]), data_hash);
  }
  data_hash = fnv1a(format_double(plan.frame_period), data_hash);
  data_hash = fnv1a(std::to_string(plan.anchor_stride), data_hash);
  std::string data_fp = hex64(data_hash);

  data::TrackSet ts(std::move(tracks), plan.frame_period);
  data::WindowResult wr = data::window(ts, plan.anchor_stride);
  const std::vector<data::Sample>& samples = wr.samples;
  if (samples.empty()) throw Error(ErrKind::no_data, "windowing produced no samples");

  scene::Vocabulary vocab = scene::Vocabulary::create(plan.vocab_dimension, plan.vocab_seed);

  // Shared encoded-input caches, one per distinct LSTM variant.
  std::vector<std::optional<InputCache>> caches(5);
  for (const auto& mc : plan.model_configs) {
    if (mc.variant == models::Variant::linear) continue;
    auto vi = static_cast<std::size_t>(mc.variant);
    if (caches[vi]) continue;
    InputCache cache;
    cache.input_dim = mc.input_dim;
    cache.flat.resize(samples.size() * static_cast<std::size_t>(data::kHistoryFrames) *
                      static_cast<std::size_t>(mc.input_dim));
    const scene::Vocabulary* vptr = models::is_spa(mc.variant) ? &vocab : nullptr;
    std::size_t stride_per_sample = static_cast<std::size_t>(data::kHistoryFrames) *
                                    static_cast<std::size_t>(mc.input_dim);
    parallel_for(samples.size(), jobs, [&](std::size_t i) {
      models::encode_inputs(ts, samples[i], vptr, mc.variant, plan.radius, plan.scale,
                            cache.flat.data() + i * stride_per_sample);
    });
    caches[vi] = std::move(cache);
  }

  struct Cell {
    std::size_t model_idx;
    data::Selector train_sel;
    std::uint64_t seed;
    std::string hash;
    std::filesystem::path dir;
    std::string status = "ok";
    std::size_t train_samples = 0;
    std::vector<models::EvalReport> evals;  // one per eval selector
  };
  std::vector<Cell> cells;
  std::string plan_hash = hex64(fnv1a(plan.to_json()));
  for (std::size_t mi = 0; mi < plan.model_configs.size(); ++mi)
    for (auto tsel : plan.train_selectors)
      for (auto seed : plan.seeds) {
        Cell c;
        c.model_idx = mi;
        c.train_sel = tsel;
        c.seed = seed;
        models::ModelConfig mc = plan.model_configs[mi];
        mc.seed = seed;
        std::string key = models::config_to_json(mc);
        key += "|train=" + selector_str(tsel);
        key += "|seed=" + std::to_string(seed);
        key += "|data=" + data_fp;
        key += "|vocab=" + std::to_string(plan.vocab_dimension) + ":" +
               std::to_string(vocab.seed());
        key += "|radius=" + format_double(plan.radius);
        key += "|scale=" + format_double(plan.scale);
        key += "|split=" + format_double(plan.split_fraction);
        c.hash = hex64(fnv1a(key));
        c.dir = outdir / "cells" /
                (std::string(models::variant_name(mc.variant)) + "-" + selector_str(tsel) +
                 "-s" + std::to_string(seed) + "-" + c.hash.substr(0, 8));
        cells.push_back(std::move(c));
      }

  // Splits and subset indices are per seed, shared across models.
  std::map<std::uint64_t, data::Split> splits;
  for (auto seed : plan.seeds) splits[seed] = data::split_ids(ts, plan.split_fraction, seed);

  RunStats local_stats;
  std::mutex stats_mutex;

  parallel_for(cells.size(), jobs, [&](std::size_t ci) {
    Cell& cell = cells[ci];
    models::ModelConfig mc = plan.model_configs[cell.model_idx];
    mc.seed = cell.seed;
    const data::Split& split = splits.at(cell.seed);
    std::vector<std::size_t> train_idx =
        select_indices(samples, split.train_ids, cell.train_sel);
    cell.train_samples = train_idx.size();
    std::filesystem::create_directories(cell.dir);

    bool is_linear = mc.variant == models::Variant::linear;
    models::LstmWeights weights;
    bool have_weights = false;
    std::filesystem::path ckpt = cell.dir / "checkpoint.json";

    try {
      if (!is_linear) {
        if (train_idx.empty()) {
          cell.status = "failed: empty training subset";
        } else if (std::filesystem::exists(ckpt)) {
          auto loaded = models::load_checkpoint(ckpt);
          weights = std::move(loaded.weights);
          have_weights = true;
          std::lock_guard<std::mutex> lock(stats_mutex);
          ++local_stats.cells_reused;
        } else {
          const InputCache& cache = *caches[static_cast<std::size_t>(mc.variant)];
          models::TrainData td;
          td.input_dim = mc.input_dim;
          std::size_t per = static_cast<std::size_t>(data::kHistoryFrames) *
                            static_cast<std::size_t>(mc.input_dim);
          td.inputs.resize(train_idx.size() * per);
          td.targets.resize(train_idx.size());
          for (std::size_t i = 0; i < train_idx.size(); ++i) {
            std::memcpy(td.inputs.data() + i * per, cache.of(train_idx[i]),
                        per * sizeof(double));
            td.targets[i] = samples[train_idx[i]].future;
          }
          auto res = models::train(mc, td, models::TrainData{mc.input_dim, {}, {}}, data_fp);
          weights = std::move(res.weights);
          have_weights = true;
          models::save_checkpoint(ckpt, mc, weights, res.log);
          write_text_file(cell.dir / "train_log.jsonl", res.log.to_jsonl());
          std::lock_guard<std::mutex> lock(stats_mutex);
          ++local_stats.cells_trained;
        }
      } else {
        write_text_file(cell.dir / "checkpoint.json",
                        "{\"version\":1,\"config\":{\"variant\":\"linear\"}}\n");
      }

      for (auto esel : plan.eval_selectors) {
        std::filesystem::path epath =
            cell.dir / (std::string("eval_") + selector_str(esel) + ".json");
        if (std::filesystem::exists(epath)) {
          cell.evals.push_back(models::eval_from_json(read_text_file(epath)));
          continue;
        }
        if (!is_linear && !have_weights) {
          cell.evals.push_back(models::EvalReport{});
          continue;
        }
        std::vector<std::size_t> eval_idx = select_indices(samples, split.val_ids, esel);
        std::vector<models::Positions> preds(eval_idx.size());
        std::vector<models::Positions> targets(eval_idx.size());
        if (is_linear) {
          for (std::size_t i = 0; i < eval_idx.size(); ++i)
            preds[i] = models::predict_linear(ts, samples[eval_idx[i]]);
        } else {
          const InputCache& cache = *caches[static_cast<std::size_t>(mc.variant)];
          for (std::size_t i = 0; i < eval_idx.size(); ++i)
            preds[i] = models::predict(weights, mc, cache.of(eval_idx[i]));
        }
        for (std::size_t i = 0; i < eval_idx.size(); ++i)
          targets[i] = samples[eval_idx[i]].future;
        models::EvalReport er = models::evaluate(preds, targets);
        write_text_file(epath, models::eval_to_json(er));
        cell.evals.push_back(er);
      }
    } catch (const Error& e) {
      cell.status = std::string("failed: ") + e.what();
      std::lock_guard<std::mutex> lock(stats_mutex);
      ++local_stats.cells_failed;
    }
  });

  ComparisonReport rep;
  rep.plan_hash = plan_hash;
  rep.data_fingerprint = data_fp;
  rep.vocab_dimension = plan.vocab_dimension;
  rep.vocab_seed = vocab.seed();
  rep.seeds = plan.seeds;
  for (const auto& cell : cells) {
    CellInfo ci;
    ci.model = models::variant_name(plan.model_configs[cell.model_idx].variant);
    ci.train_selector = selector_str(cell.train_sel);
    ci.seed = cell.seed;
    ci.hash = cell.hash;
    ci.status = cell.status;
    ci.train_samples = cell.train_samples;
    rep.cells.push_back(std::move(ci));
  }

  for (std::size_t mi = 0; mi < plan.model_configs.size(); ++mi) {
    for (auto tsel : plan.train_selectors) {
      for (std::size_t ei = 0; ei < plan.eval_selectors.size(); ++ei) {
        auto esel = plan.eval_selectors[ei];
        ResultRow row;
        row.model = models::variant_name(plan.model_configs[mi].variant);
        row.train_selector = selector_str(tsel);
        row.eval_selector = selector_str(esel);
        row.setup = setup_id(tsel, esel);
        std::vector<double> agg;
        std::array<std::vector<double>, data::kFutureFrames> xs, ys;
        for (const auto& cell : cells) {
          if (cell.model_idx != mi || cell.train_sel != tsel) continue;
          if (cell.status != "ok" || cell.evals.size() != plan.eval_selectors.size())
            continue;
          const auto& er = cell.evals[ei];
          if (er.empty()) continue;
          row.seeds_used.push_back(cell.seed);
          row.eval_counts.push_back(er.count);
          agg.push_back(er.aggregate);
          for (int k = 0; k < data::kFutureFrames; ++k) {
            auto ks = static_cast<std::size_t>(k);
            xs[ks].push_back(er.rmse_x[ks]);
            ys[ks].push_back(er.rmse_y[ks]);
          }
        }
        row.empty = row.seeds_used.empty();
        if (!row.empty) {
          for (int k = 0; k < data::kFutureFrames; ++k) {
            auto ks = static_cast<std::size_t>(k);
            row.rmse_x_mean[ks] = mean_of(xs[ks]);
            row.rmse_x_std[ks] = std_of(xs[ks], row.rmse_x_mean[ks]);
            row.rmse_y_mean[ks] = mean_of(ys[ks]);
            row.rmse_y_std[ks] = std_of(ys[ks], row.rmse_y_mean[ks]);
          }
          row.aggregate_mean = mean_of(agg);
          row.aggregate_std = std_of(agg, row.aggregate_mean);

          std::string csv = "step,t_s,rmse_x_mean,rmse_x_std,rmse_y_mean,rmse_y_std\n";
          for (int k = 0; k < data::kFutureFrames; ++k) {
            auto ks = static_cast<std::size_t>(k);
            csv += std::to_string(k + 1) + "," +
                   format_double((k + 1) * plan.frame_period) + "," +
                   format_double(row.rmse_x_mean[ks]) + "," +
                   format_double(row.rmse_x_std[ks]) + "," +
                   format_double(row.rmse_y_mean[ks]) + "," +
                   format_double(row.rmse_y_std[ks]) + "\n";
          }
          write_text_file(outdir / "curves" /
                              (row.model + "_" + row.setup + "_" + row.train_selector +
                               "_" + row.eval_selector + ".csv"),
                          csv);
        }
        rep.rows.push_back(std::move(row));
      }
    }
  }

  write_text_file(outdir / "report.json", rep.to_json());
  write_text_file(outdir / "plan.json", plan.to_json());
  {
    json manifest;
    manifest["version"] = 1;
    manifest["plan_hash"] = plan_hash;
    manifest["data_fingerprint"] = data_fp;
    json inputs = json::object();
    for (const auto& d : plan.datasets) inputs[d] = hex64(hash_file(d));
    manifest["input_hashes"] = inputs;
    manifest["vocabulary"] = {{"dimension", plan.vocab_dimension}, {"seed", vocab.seed()}};
    manifest["seeds"] = plan.seeds;
    manifest["samples"] = samples.size();
    manifest["skipped_no_lane"] = wr.skipped_no_lane;
    write_text_file(outdir / "manifest.json", manifest.dump(2) + "\n");
  }

  if (stats) *stats = local_stats;
  if (local_stats.cells_failed > 0 && !allow_partial)
    throw Error(ErrKind::no_data, std::to_string(local_stats.cells_failed) +
                                      " matrix cells failed; re-run with --allow-partial "
                                      "to accept a partial report");
  return rep;
}

CompareResult compare(const ComparisonReport& report, const std::string& metric,
                      int horizon_step) {
  if (metric != "rmse_x" && metric != "rmse_y" && metric != "aggregate")
    throw Error(ErrKind::config, "unknown metric: " + metric);
  if (horizon_step < 1 || horizon_step > data::kFutureFrames)
    throw Error(ErrKind::config, "horizon step out of range");

  auto value_of = [&](const ResultRow& r) {
    auto ks = static_cast<std::size_t>(horizon_step - 1);
    if (metric == "rmse_x") return r.rmse_x_mean[ks];
    if (metric == "rmse_y") return r.rmse_y_mean[ks];
    return r.aggregate_mean;
  };

  std::vector<std::string> model_order;
  for (const auto& r : report.rows)
    if (std::find(model_order.begin(), model_order.end(), r.model) == model_order.end())
      model_order.push_back(r.model);

  std::vector<std::pair<std::string, std::string>> pairs;  // (train, eval)
  for (const auto& r : report.rows) {
    auto p = std::make_pair(r.train_selector, r.eval_selector);
    if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
  }

  CompareResult res;
  res.metric = metric;
  res.horizon_step = horizon_step;
  for (const auto& [tsel, esel] : pairs) {
    SetupRanking sr;
    sr.train_selector = tsel;
    sr.eval_selector = esel;
    for (const auto& m : model_order) {
      const ResultRow* row = report.find(m, tsel, esel);
      CompareEntry e;
      e.model = m;
      if (!row || row->empty) {
        e.missing = true;
      } else {
        sr.setup = row->setup;
        e.value = value_of(*row);
      }
      sr.entries.push_back(e);
    }
    std::stable_sort(sr.entries.begin(), sr.entries.end(),
                     [](const CompareEntry& a, const CompareEntry& b) {
                       if (a.missing != b.missing) return !a.missing;
                       if (a.missing) return false;
                       return a.value < b.value;
                     });
    res.setups.push_back(std::move(sr));
  }

  // Training-set effect: lane-change-trained minus all-trained, same model
  // and evaluation subset.
  for (const auto& m : model_order) {
    for (const auto& [tsel, esel] : pairs) {
      if (tsel != "all") continue;
      const ResultRow* all_row = report.find(m, "all", esel);
      const ResultRow* lc_row = report.find(m, "lane_change_any", esel);
      TrainingEffect eff;
      eff.model = m;
      eff.eval_selector = esel;
      if (all_row && lc_row && !all_row->empty && !lc_row->empty) {
        eff.all_trained = value_of(*all_row);
        eff.lc_trained = value_of(*lc_row);
        eff.delta = eff.lc_trained - eff.all_trained;
        eff.complete = true;
      }
      res.effects.push_back(std::move(eff));
    }
  }
  return res;
}

std::string CompareResult::text() const {
  std::string out = "ranking by " + metric + " at horizon step " +
                    std::to_string(horizon_step) + "\n";
  for (const auto& s : setups) {
    out += "setup (" + (s.setup.empty() ? "?" : s.setup) + ") train=" + s.train_selector +
           " eval=" + s.eval_selector + "\n";
    int rank = 1;
    for (const auto& e : s.entries) {
      if (e.missing) {
        out += "   -. " + e.model + "  [missing cell]\n";
      } else {
        out += "   " + std::to_string(rank++) + ". " + e.model + "  " +
               format_double(e.value) + "\n";
      }
    }
  }
  out += "training-set effect (lane_change_any-trained minus all-trained, " + metric +
         " @ step " + std::to_string(horizon_step) + ")\n";
  for (const auto& e : effects) {
    if (!e.complete) {
      out += "   " + e.model + " on " + e.eval_selector + ": [incomplete]\n";
    } else {
      out += "   " + e.model + " on " + e.eval_selector + ": " + format_double(e.delta) +
             (e.delta < 0 ? "  (improves)" : "") + "\n";
    }
  }
  return out;
}

std::string CompareResult::to_json() const {
  json j;
  j["metric"] = metric;
  j["horizon_step"] = horizon_step;
  json js = json::array();
  for (const auto& s : setups) {
    json e;
    e["setup"] = s.setup;
    e["train_selector"] = s.train_selector;
    e["eval_selector"] = s.eval_selector;
    json entries = json::array();
    for (const auto& en : s.entries) {
      json je;
      je["model"] = en.model;
      if (en.missing)
        je["value"] = nullptr;
      else
        je["value"] = en.value;
      entries.push_back(je);
    }
    e["ranking"] = entries;
    js.push_back(e);
  }
  j["setups"] = js;
  json jd = json::array();
  for (const auto& e : effects) {
    json je;
    je["model"] = e.model;
    je["eval_selector"] = e.eval_selector;
    if (e.complete) {
      je["all_trained"] = e.all_trained;
      je["lane_change_trained"] = e.lc_trained;
      je["delta"] = e.delta;
    } else {
      je["delta"] = nullptr;
    }
    jd.push_back(je);
  }
  j["training_set_effect"] = jd;
  return j.dump(2) + "\n";
}

}  // namespace holotraj::experiments
