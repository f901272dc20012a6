#include "holotraj/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "holotraj/error.hpp"
#include "holotraj/rng.hpp"
#include "holotraj/util.hpp"

namespace holotraj::data {
namespace {

const char* kCanonicalColumns[] = {"t",  "id", "x",     "y",       "vx",    "vy",
                                   "ax", "ay", "p_car", "p_truck", "p_moto", "lane",
                                   "dl", "dr", "is_ego"};

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct ColumnPlan {
  // index into the source header for each canonical column, -1 when absent
  std::array<int, 15> index;
  std::array<double, 15> scale;
};

ColumnPlan resolve_columns(const std::vector<std::string_view>& header,
                           const LoadOptions& options) {
  ColumnPlan plan;
  plan.index.fill(-1);
  plan.scale.fill(1.0);
  for (int c = 0; c < 15; ++c) {
    std::string want = kCanonicalColumns[c];
    if (options.mapping) {
      auto it = options.mapping->columns.find(want);
      if (it != options.mapping->columns.end()) want = it->second;
      auto sc = options.mapping->scales.find(kCanonicalColumns[c]);
      if (sc != options.mapping->scales.end()) plan.scale[static_cast<std::size_t>(c)] = sc->second;
    }
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == want) {
        plan.index[static_cast<std::size_t>(c)] = static_cast<int>(h);
        break;
      }
    }
  }
  for (int c : {0, 1, 2, 3}) {  // t, id, x, y
    if (plan.index[static_cast<std::size_t>(c)] < 0)
      throw Error(ErrKind::schema,
                  std::string("missing mandatory column '") + kCanonicalColumns[c] + "'");
  }
  return plan;
}

double infer_frame_period(const std::vector<std::vector<ObjectFrame>>& groups) {
  std::vector<double> deltas;
  for (const auto& g : groups)
    for (std::size_t i = 1; i < g.size(); ++i) deltas.push_back(g[i].t - g[i - 1].t);
  if (deltas.empty()) return kDefaultFramePeriod;
  std::nth_element(deltas.begin(), deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2), deltas.end());
  return deltas[deltas.size() / 2];
}

// Debounced lane sequence: a lane id must persist >= 2 consecutive frames to
// count; one-frame flickers inherit the surrounding stable lane.
std::vector<int> debounce_lanes(const std::vector<ObjectFrame>& frames) {
  std::vector<int> out(frames.size());
  struct Run {
    int lane;
    std::size_t start, len;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!runs.empty() && runs.back().lane == frames[i].lane) {
      runs.back().len++;
    } else {
      runs.push_back({frames[i].lane, i, 1});
    }
  }
  bool any_real = std::any_of(runs.begin(), runs.end(), [](const Run& r) { return r.len >= 2; });
  if (!any_real) {
    std::fill(out.begin(), out.end(), frames.empty() ? 0 : frames[0].lane);
    return out;
  }
  int prev_real = 0;
  bool have_prev = false;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    int lane;
    if (runs[r].len >= 2) {
      lane = runs[r].lane;
      prev_real = lane;
      have_prev = true;
    } else if (have_prev) {
      lane = prev_real;
    } else {
      // leading flicker: adopt the first stable lane
      lane = 0;
      for (std::size_t q = r + 1; q < runs.size(); ++q)
        if (runs[q].len >= 2) {
          lane = runs[q].lane;
          break;
        }
    }
    for (std::size_t i = 0; i < runs[r].len; ++i) out[runs[r].start + i] = lane;
  }
  return out;
}

std::pair<bool, bool> lane_change_flags(std::span<const int> lanes, std::int32_t anchor) {
  int ref = lanes[static_cast<std::size_t>(anchor)];
  bool past = false, future = false;
  for (int j = anchor - (kHistoryFrames - 1); j <= anchor; ++j)
    if (lanes[static_cast<std::size_t>(j)] != ref) past = true;
  for (int j = anchor + 1; j <= anchor + kFutureFrames; ++j)
    if (lanes[static_cast<std::size_t>(j)] != ref) future = true;
  return {past, future};
}

struct CrowdCheck {
  bool ego_present = false;
  bool crowded = false;
};

CrowdCheck crowd_check(const TrackSet& ts, const Sample& s) {
  CrowdCheck res;
  const auto& anchor_frame = ts.history_frame(s, kHistoryFrames - 1);
  std::int64_t grid = ts.grid_index(anchor_frame.t);
  double tx = s.anchor_pos[0], ty = s.anchor_pos[1];
  double ego_dist = kNaN;
  double nearest_other = kNaN;
  int other_count = 0;
  for (const auto& vis : ts.visible_at(grid)) {
    if (vis.track == s.track_index) continue;
    const auto& tr = ts.tracks()[static_cast<std::size_t>(vis.track)];
    const auto& fr = tr.frames[static_cast<std::size_t>(vis.frame)];
    double d = std::hypot(fr.x - tx, fr.y - ty);
    if (tr.is_ego) {
      if (!res.ego_present || d < ego_dist) ego_dist = d;
      res.ego_present = true;
    } else {
      ++other_count;
      if (std::isnan(nearest_other) || d < nearest_other) nearest_other = d;
    }
  }
  if (!res.ego_present) return res;
  res.crowded = ego_dist < 20.0 && other_count >= 3 && nearest_other < 20.0;
  return res;
}

}  // namespace

ColumnMapping ColumnMapping::from_json_file(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrKind::schema, "column mapping: " + std::string(e.what()));
  }
  ColumnMapping m;
  if (j.contains("columns"))
    for (auto& [k, v] : j["columns"].items()) m.columns[k] = v.get<std::string>();
  if (j.contains("scales"))
    for (auto& [k, v] : j["scales"].items()) m.scales[k] = v.get<double>();
  return m;
}

std::vector<TrackedObject> load(const std::filesystem::path& path,
                                const LoadOptions& options) {
  std::string text = read_text_file(path);
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t nl = text.find('\n', start);
      std::string_view line = nl == std::string::npos
                                  ? std::string_view(text).substr(start)
                                  : std::string_view(text).substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) lines.push_back(line);
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }
  if (lines.empty()) throw Error(ErrKind::schema, "empty object-list file: " + path.string());

  auto header = split_csv_line(lines[0]);
  ColumnPlan plan = resolve_columns(header, options);

  auto field = [&](const std::vector<std::string_view>& row, int canonical) -> std::string_view {
    int idx = plan.index[static_cast<std::size_t>(canonical)];
    if (idx < 0 || static_cast<std::size_t>(idx) >= row.size()) return {};
    return row[static_cast<std::size_t>(idx)];
  };

  std::unordered_map<std::int64_t, std::vector<ObjectFrame>> by_id;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    auto row = split_csv_line(lines[ln]);
    if (row.size() != header.size())
      throw Error(ErrKind::validation, "line " + std::to_string(ln + 1) + ": expected " +
                                           std::to_string(header.size()) + " fields, got " +
                                           std::to_string(row.size()));
    ObjectFrame f;
    auto want_double = [&](int c, const char* name) {
      auto v = parse_double(field(row, c));
      if (!v)
        throw Error(ErrKind::validation,
                    "line " + std::to_string(ln + 1) + ": bad value for '" + name + "'");
      return *v * plan.scale[static_cast<std::size_t>(c)];
    };
    auto opt_double = [&](int c) {
      auto v = parse_double(field(row, c));
      return v ? *v * plan.scale[static_cast<std::size_t>(c)] : kNaN;
    };
    f.t = want_double(0, "t");
    auto id = parse_int(field(row, 1));
    if (!id)
      throw Error(ErrKind::validation, "line " + std::to_string(ln + 1) + ": bad value for 'id'");
    f.id = *id;
    f.x = want_double(2, "x");
    f.y = want_double(3, "y");
    if (!std::isfinite(f.t) || !std::isfinite(f.x) || !std::isfinite(f.y))
      throw Error(ErrKind::validation,
                  "line " + std::to_string(ln + 1) + ": non-finite t/x/y");
    f.vx = opt_double(4);
    f.vy = opt_double(5);
    f.ax = opt_double(6);
    f.ay = opt_double(7);
    if (plan.index[8] >= 0 || plan.index[9] >= 0 || plan.index[10] >= 0) {
      f.p_car = opt_double(8);
      f.p_truck = opt_double(9);
      f.p_moto = opt_double(10);
      if (std::isnan(f.p_car)) f.p_car = 0.0;
      if (std::isnan(f.p_truck)) f.p_truck = 0.0;
      if (std::isnan(f.p_moto)) f.p_moto = 0.0;
    }
    if (auto lane = parse_int(field(row, 11))) {
      f.lane = static_cast<int>(*lane);
      f.lane_known = true;
    }
    f.dl = opt_double(12);
    f.dr = opt_double(13);
    if (auto ego = parse_int(field(row, 14))) f.is_ego = *ego != 0;
    by_id[f.id].push_back(f);
  }

  std::vector<std::int64_t> ids;
  ids.reserve(by_id.size());
  for (auto& [id, _] : by_id) ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  std::vector<std::vector<ObjectFrame>> groups;
  std::vector<std::string> offenders;
  for (std::int64_t id : ids) {
    auto& g = by_id[id];
    std::stable_sort(g.begin(), g.end(),
                     [](const ObjectFrame& a, const ObjectFrame& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < g.size(); ++i)
      if (g[i].t == g[i - 1].t && offenders.size() < 5)
        offenders.push_back("id " + std::to_string(id) + " at t=" + format_double(g[i].t));
    groups.push_back(std::move(g));
  }
  if (!offenders.empty()) {
    std::string msg = "non-monotonic timestamps (duplicates):";
    for (const auto& o : offenders) msg += " " + o + ";";
    throw Error(ErrKind::validation, msg);
  }

  double period = options.frame_period.value_or(infer_frame_period(groups));
  if (!(period > 0.0)) throw Error(ErrKind::validation, "non-positive frame period");

  std::vector<TrackedObject> tracks;
  for (auto& g : groups) {
    std::size_t start = 0;
    for (std::size_t i = 1; i <= g.size(); ++i) {
      bool cut = i == g.size() || (g[i].t - g[i - 1].t) > 2.0 * period + 1e-9;
      if (!cut) continue;
      TrackedObject tr;
      tr.id = g[start].id;
      tr.frames.assign(g.begin() + static_cast<std::ptrdiff_t>(start),
                       g.begin() + static_cast<std::ptrdiff_t>(i));
      tr.is_ego = std::any_of(tr.frames.begin(), tr.frames.end(),
                              [](const ObjectFrame& f) { return f.is_ego; });
      tracks.push_back(std::move(tr));
      start = i;
    }
  }
  return tracks;
}

ValidationReport validate(const std::filesystem::path& path, const LoadOptions& options) {
  ValidationReport rep;
  std::vector<TrackedObject> tracks;
  try {
    tracks = load(path, options);
  } catch (const Error& e) {
    rep.errors.push_back(e.what());
    return rep;
  }
  if (tracks.empty()) {
    rep.warnings.push_back("no tracks in file");
    return rep;
  }
  double period = options.frame_period.value_or(kDefaultFramePeriod);
  if (!options.frame_period) {
    std::vector<std::vector<ObjectFrame>> groups;
    for (auto& t : tracks) groups.push_back(t.frames);
    period = infer_frame_period(groups);
  }
  int spacing_bad = 0, prob_bad = 0;
  for (const auto& tr : tracks) {
    for (std::size_t i = 1; i < tr.frames.size(); ++i)
      if (std::abs(tr.frames[i].t - tr.frames[i - 1].t - period) > 1e-6) ++spacing_bad;
    for (const auto& f : tr.frames) {
      double s = f.p_car + f.p_truck + f.p_moto;
      if (std::abs(s - 1.0) > 1e-6) ++prob_bad;
    }
  }
  if (spacing_bad > 0)
    rep.warnings.push_back("non-uniform frame spacing in " + std::to_string(spacing_bad) +
                           " frame pairs (period " + format_double(period) + " s)");
  if (prob_bad > 0)
    rep.warnings.push_back("type probabilities do not sum to 1 in " +
                           std::to_string(prob_bad) + " frames");
  return rep;
}

void write_object_list(const std::filesystem::path& path, std::span<const ObjectFrame> rows) {
  std::vector<const ObjectFrame*> order;
  order.reserve(rows.size());
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const ObjectFrame* a, const ObjectFrame* b) {
    if (a->t != b->t) return a->t < b->t;
    return a->id < b->id;
  });
  std::string out = "t,id,x,y,vx,vy,ax,ay,p_car,p_truck,p_moto,lane,dl,dr,is_ego\n";
  for (const ObjectFrame* f : order) {
    out += format_double(f->t);
    out += ',';
    out += std::to_string(f->id);
    for (double v : {f->x, f->y, f->vx, f->vy, f->ax, f->ay, f->p_car, f->p_truck, f->p_moto}) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    if (f->lane_known) out += std::to_string(f->lane);
    out += ',';
    out += format_double(f->dl);
    out += ',';
    out += format_double(f->dr);
    out += ',';
    out += f->is_ego ? '1' : '0';
    out += '\n';
  }
  write_text_file(path, out);
}

TrackSet::TrackSet(std::vector<TrackedObject> tracks, double frame_period)
    : tracks_(std::move(tracks)), frame_period_(frame_period) {
  if (!(frame_period_ > 0.0)) throw Error(ErrKind::config, "frame period must be > 0");
  types_.reserve(tracks_.size());
  stable_lanes_.reserve(tracks_.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    const auto& tr = tracks_[i];
    double pc = 0, pt = 0, pm = 0;
    for (const auto& f : tr.frames) {
      pc += f.p_car;
      pt += f.p_truck;
      pm += f.p_moto;
    }
    scene::ObjectType ty = scene::ObjectType::car;
    if (pt > pc && pt >= pm) ty = scene::ObjectType::truck;
    else if (pm > pc && pm > pt) ty = scene::ObjectType::motorcycle;
    types_.push_back(ty);

    bool lanes_ok = !tr.frames.empty() &&
                    std::all_of(tr.frames.begin(), tr.frames.end(),
                                [](const ObjectFrame& f) { return f.lane_known; });
    stable_lanes_.push_back(lanes_ok ? debounce_lanes(tr.frames) : std::vector<int>{});

    for (std::size_t j = 0; j < tr.frames.size(); ++j)
      visible_[grid_index(tr.frames[j].t)].push_back(
          {static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
  }
  for (auto& [grid, vec] : visible_) {
    std::sort(vec.begin(), vec.end(), [this](const Visible& a, const Visible& b) {
      std::int64_t ia = tracks_[static_cast<std::size_t>(a.track)].id;
      std::int64_t ib = tracks_[static_cast<std::size_t>(b.track)].id;
      if (ia != ib) return ia < ib;
      return a.track < b.track;
    });
  }
}

scene::ObjectType TrackSet::track_type(std::size_t track_index) const {
  return types_[track_index];
}

std::span<const int> TrackSet::stable_lanes(std::size_t track_index) const {
  return stable_lanes_[track_index];
}

std::int64_t TrackSet::grid_index(double t) const {
  return std::llround(t / frame_period_);
}

std::span<const TrackSet::Visible> TrackSet::visible_at(std::int64_t grid) const {
  auto it = visible_.find(grid);
  if (it == visible_.end()) return {};
  return it->second;
}

const ObjectFrame& TrackSet::history_frame(const Sample& s, int step) const {
  const auto& tr = tracks_[static_cast<std::size_t>(s.track_index)];
  return tr.frames[static_cast<std::size_t>(s.anchor_index - (kHistoryFrames - 1) + step)];
}

scene::SceneSnapshot TrackSet::history_snapshot(const Sample& s, int step) const {
  const auto& tf = history_frame(s, step);
  double ax = s.anchor_pos[0], ay = s.anchor_pos[1];
  scene::SceneSnapshot snap;
  snap.timestamp = tf.t;
  snap.target = {s.target_id, tf.x - ax, tf.y - ay,
                 types_[static_cast<std::size_t>(s.track_index)]};
  for (const auto& vis : visible_at(grid_index(tf.t))) {
    if (vis.track == s.track_index) continue;
    const auto& tr = tracks_[static_cast<std::size_t>(vis.track)];
    const auto& fr = tr.frames[static_cast<std::size_t>(vis.frame)];
    if (tr.is_ego) {
      if (!snap.ego) snap.ego = {{fr.x - ax, fr.y - ay}};
      continue;
    }
    snap.others.push_back({tr.id, fr.x - ax, fr.y - ay,
                           types_[static_cast<std::size_t>(vis.track)]});
  }
  return snap;
}

WindowResult window(const TrackSet& ts, int anchor_stride) {
  if (anchor_stride < 1) throw Error(ErrKind::config, "anchor stride must be >= 1");
  WindowResult res;
  const auto& tracks = ts.tracks();
  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    const auto& tr = tracks[ti];
    if (tr.is_ego) continue;
    std::int64_t n = static_cast<std::int64_t>(tr.frames.size());
    auto lanes = ts.stable_lanes(ti);
    for (std::int64_t a = kHistoryFrames - 1; a + kFutureFrames < n; a += anchor_stride) {
      if (lanes.empty()) {
        ++res.skipped_no_lane;
        continue;
      }
      Sample s;
      s.track_index = static_cast<std::int32_t>(ti);
      s.target_id = tr.id;
      s.anchor_index = static_cast<std::int32_t>(a);
      const auto& af = tr.frames[static_cast<std::size_t>(a)];
      s.anchor_t = af.t;
      s.anchor_pos = {af.x, af.y};
      for (int k = 0; k < kFutureFrames; ++k) {
        const auto& ff = tr.frames[static_cast<std::size_t>(a + 1 + k)];
        s.future[static_cast<std::size_t>(k)] = {ff.x - af.x, ff.y - af.y};
      }
      auto [past, future] = lane_change_flags(lanes, s.anchor_index);
      s.lane_change_past = past;
      s.lane_change_future = future;
      CrowdCheck cc = crowd_check(ts, s);
      s.crowd_label_ok = cc.ego_present;
      s.crowded = cc.crowded;
      if (!cc.ego_present) ++res.crowd_unknown;
      res.samples.push_back(s);
    }
  }
  return res;
}

std::pair<bool, bool> label_lane_change(const TrackSet& ts, const Sample& s) {
  auto lanes = ts.stable_lanes(static_cast<std::size_t>(s.track_index));
  if (lanes.empty())
    throw Error(ErrKind::label_unavailable,
                "lane information missing for object " + std::to_string(s.target_id));
  return lane_change_flags(lanes, s.anchor_index);
}

bool label_crowded(const TrackSet& ts, const Sample& s) {
  CrowdCheck cc = crowd_check(ts, s);
  if (!cc.ego_present)
    throw Error(ErrKind::label_unavailable, "no ego vehicle visible at the anchor frame");
  return cc.crowded;
}

Split split_ids(const TrackSet& ts, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrKind::split, "train fraction must be in (0, 1)");
  std::vector<std::int64_t> ids;
  for (const auto& tr : ts.tracks())
    if (!tr.is_ego) ids.push_back(tr.id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < 2)
    throw Error(ErrKind::split, "need at least 2 target objects to split");
  Rng rng = Rng::stream(seed, 0x73706c6974ull);  // "split"
  rng.shuffle(ids);
  std::size_t n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(ids.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, ids.size() - 1);
  Split sp;
  sp.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  sp.val_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(sp.train_ids.begin(), sp.train_ids.end());
  std::sort(sp.val_ids.begin(), sp.val_ids.end());
  return sp;
}

const char* selector_name(Selector s) {
  switch (s) {
    case Selector::all: return "all";
    case Selector::lane_change_any: return "lane_change_any";
    case Selector::lane_change_future: return "lane_change_future";
    case Selector::crowded: return "crowded";
    case Selector::crowded_and_lane_change: return "crowded_and_lane_change";
  }
  return "all";
}

std::optional<Selector> selector_from_name(const std::string& name) {
  for (Selector s : {Selector::all, Selector::lane_change_any, Selector::lane_change_future,
                     Selector::crowded, Selector::crowded_and_lane_change})
    if (name == selector_name(s)) return s;
  return std::nullopt;
}

std::vector<Sample> select_subset(const std::vector<Sample>& samples, Selector sel) {
  std::vector<Sample> out;
  for (const auto& s : samples) {
    bool keep = false;
    switch (sel) {
      case Selector::all: keep = true; break;
      case Selector::lane_change_any: keep = s.lane_change_past || s.lane_change_future; break;
      case Selector::lane_change_future: keep = s.lane_change_future; break;
      case Selector::crowded: keep = s.crowd_label_ok && s.crowded; break;
      case Selector::crowded_and_lane_change:
        keep = s.crowd_label_ok && s.crowded && (s.lane_change_past || s.lane_change_future);
        break;
    }
    if (keep) out.push_back(s);
  }
  return out;
}

std::vector<Sample> filter_by_ids(const std::vector<Sample>& samples,
                                  std::span<const std::int64_t> ids) {
  std::vector<Sample> out;
  for (const auto& s : samples)
    if (std::binary_search(ids.begin(), ids.end(), s.target_id)) out.push_back(s);
  return out;
}

CompositionReport composition_report(const std::vector<Sample>& samples) {
  CompositionReport r;
  r.total = static_cast<std::int64_t>(samples.size());
  for (const auto& s : samples) {
    bool p = s.lane_change_past, f = s.lane_change_future;
    if (!p && !f) ++r.none;
    if (p) ++r.past;
    if (f) ++r.future;
    if (p && f) ++r.overlap;
    if (s.crowd_label_ok) {
      if (s.crowded) ++r.crowded;
    } else {
      ++r.crowd_unknown;
    }
  }
  return r;
}

CompositionReport composition_report(const WindowResult& wr) {
  CompositionReport r = composition_report(wr.samples);
  r.excluded_no_lane = wr.skipped_no_lane;
  return r;
}

CompositionReport composition_from_counts(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrKind::schema, "counts file: " + std::string(e.what()));
  }
  CompositionReport r;
  if (j.contains("label")) r.label = j["label"].get<std::string>();
  for (auto [name, dst] : {std::pair<const char*, std::int64_t*>{"total", &r.total},
                           {"none", &r.none},
                           {"past", &r.past},
                           {"future", &r.future},
                           {"overlap", &r.overlap}}) {
    if (!j.contains(name))
      throw Error(ErrKind::schema, std::string("counts file missing '") + name + "'");
    *dst = j[name].get<std::int64_t>();
  }
  if (j.contains("crowded")) r.crowded = j["crowded"].get<std::int64_t>();
  if (r.none + r.any() != r.total)
    throw Error(ErrKind::validation, "counts are inconsistent: none + any != total");
  return r;
}

namespace {
std::string pct1(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", p);
  return buf;
}
}  // namespace

std::string format_composition(const CompositionReport& r) {
  if (r.empty()) {
    std::string out = "composition: empty data set (0 samples)\n";
    if (r.excluded_no_lane > 0)
      out += "  excluded (no lane info): " + std::to_string(r.excluded_no_lane) + "\n";
    return out;
  }
  std::string head = r.label.empty() ? "composition" : "composition [" + r.label + "]";
  std::string out = head + " (" + std::to_string(r.total) + " samples)\n";
  auto line = [&](const char* name, std::int64_t c) {
    out += "  ";
    out += name;
    std::size_t pad = 22 > std::string(name).size() ? 22 - std::string(name).size() : 1;
    out += std::string(pad, ' ');
    out += pct1(r.pct(c)) + "%  (" + std::to_string(c) + ")\n";
  };
  line("no lane change", r.none);
  line("lane change (any)", r.any());
  line("  past", r.past);
  line("  future", r.future);
  line("  past & future", r.overlap);
  if (r.crowd_unknown == r.total) {
    out += "  crowded               n/a (no ego information)\n";
  } else {
    line("crowded", r.crowded);
  }
  if (r.excluded_no_lane > 0)
    out += "  excluded (no lane info): " + std::to_string(r.excluded_no_lane) + "\n";
  return out;
}

std::string composition_to_json(const CompositionReport& r) {
  nlohmann::json j;
  j["label"] = r.label;
  j["total"] = r.total;
  j["none"] = r.none;
  j["past"] = r.past;
  j["future"] = r.future;
  j["overlap"] = r.overlap;
  j["any"] = r.any();
  j["crowded"] = r.crowded;
  j["crowd_unknown"] = r.crowd_unknown;
  j["excluded_no_lane"] = r.excluded_no_lane;
  if (!r.empty()) {
    j["pct"] = {{"none", pct1(r.pct(r.none))},   {"past", pct1(r.pct(r.past))},
                {"future", pct1(r.pct(r.future))}, {"overlap", pct1(r.pct(r.overlap))},
                {"any", pct1(r.pct(r.any()))},     {"crowded", pct1(r.pct(r.crowded))}};
  }
  return j.dump(2) + "\n";
}

}  // namespace holotraj::data
