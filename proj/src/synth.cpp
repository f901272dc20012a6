#include "holotraj/synth.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "holotraj/error.hpp"
#include "holotraj/rng.hpp"
#include "holotraj/util.hpp"

namespace holotraj::synth {
namespace {

// Per-vehicle rng purposes; keeping them on separate streams makes every
// vehicle's randomness independent of how much the others consumed.
enum Purpose : std::uint64_t { kParams = 1, kSpeed = 2, kLaneChange = 3, kNoise = 4 };

double lane_center(int lane, double width) { return lane * width; }

// Minimum-jerk blend, q(0)=0, q(1)=1, with zero first and second derivatives
// at both ends.
double quintic(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }

struct VehicleState {
  scene::ObjectType type = scene::ObjectType::car;
  int lane0 = 0;
  double x0 = 0.0;
  double base_speed = 0.0;
  std::vector<double> x;  // truth positions per frame
  std::vector<LaneChangeInterval> intervals;
};

int lane_at(const VehicleState& v, double t) {
  int lane = v.lane0;
  for (const auto& iv : v.intervals) {
    if (t < iv.start_s) break;
    double mid = 0.5 * (iv.start_s + iv.end_s);
    lane = (t < mid) ? iv.from_lane : iv.to_lane;
  }
  return lane;
}

double lateral_at(const VehicleState& v, double t, double width) {
  double y = lane_center(v.lane0, width);
  for (const auto& iv : v.intervals) {
    if (t < iv.start_s) break;
    if (t >= iv.end_s) {
      y = lane_center(iv.to_lane, width);
    } else {
      double s = (t - iv.start_s) / (iv.end_s - iv.start_s);
      double y0 = lane_center(iv.from_lane, width);
      double y1 = lane_center(iv.to_lane, width);
      y = y0 + (y1 - y0) * quintic(s);
    }
  }
  return y;
}

}  // namespace

void HighwayConfig::validate() const {
  if (lanes < 2) throw Error(ErrKind::config, "need at least 2 lanes");
  if (vehicles < 1) throw Error(ErrKind::config, "need at least 1 vehicle");
  if (!(lane_width > 0.0)) throw Error(ErrKind::config, "lane width must be > 0");
  if (!(duration_s > 0.0)) throw Error(ErrKind::config, "duration must be > 0");
  if (!(frame_period_s > 0.0)) throw Error(ErrKind::config, "frame period must be > 0");
  if (duration_s < frame_period_s)
    throw Error(ErrKind::config, "duration shorter than one frame period");
  if (!(speed_min > 0.0) || speed_max < speed_min)
    throw Error(ErrKind::config, "invalid speed range");
  if (lane_change_rate_per_min < 0.0) throw Error(ErrKind::config, "negative lane-change rate");
  if (!(lane_change_duration_s > 0.0))
    throw Error(ErrKind::config, "lane-change duration must be > 0");
  if (position_noise_std < 0.0 || speed_noise_std < 0.0)
    throw Error(ErrKind::config, "negative noise std");
  if (!(speed_noise_tau_s > 0.0)) throw Error(ErrKind::config, "OU time constant must be > 0");
  if (!(initial_spacing_m > 0.0)) throw Error(ErrKind::config, "spacing must be > 0");
}

HighwayConfig HighwayConfig::from_json_file(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrKind::config, "highway config: " + std::string(e.what()));
  }
  HighwayConfig c;
  static const char* known[] = {
      "lanes",          "lane_width",       "duration_s",
      "frame_period_s", "vehicles",         "speed_min",
      "speed_max",      "lane_change_rate_per_min", "lane_change_duration_s",
      "position_noise_std", "speed_noise_std", "speed_noise_tau_s",
      "initial_spacing_m",  "seed"};
  for (auto& [key, _] : j.items()) {
    bool ok = std::any_of(std::begin(known), std::end(known),
                          [&](const char* k) { return key == k; });
    if (!ok) throw Error(ErrKind::config, "unknown highway config key: " + key);
  }
  auto get = [&](const char* k, auto& dst) {
    if (j.contains(k)) dst = j[k].get<std::decay_t<decltype(dst)>>();
  };
  get("lanes", c.lanes);
  get("lane_width", c.lane_width);
  get("duration_s", c.duration_s);
  get("frame_period_s", c.frame_period_s);
  get("vehicles", c.vehicles);
  get("speed_min", c.speed_min);
  get("speed_max", c.speed_max);
  get("lane_change_rate_per_min", c.lane_change_rate_per_min);
  get("lane_change_duration_s", c.lane_change_duration_s);
  get("position_noise_std", c.position_noise_std);
  get("speed_noise_std", c.speed_noise_std);
  get("speed_noise_tau_s", c.speed_noise_tau_s);
  get("initial_spacing_m", c.initial_spacing_m);
  get("seed", c.seed);
  c.validate();
  return c;
}

std::string HighwayConfig::to_json() const {
  nlohmann::json j;
  j["lanes"] = lanes;
  j["lane_width"] = lane_width;
  j["duration_s"] = duration_s;
  j["frame_period_s"] = frame_period_s;
  j["vehicles"] = vehicles;
  j["speed_min"] = speed_min;
  j["speed_max"] = speed_max;
  j["lane_change_rate_per_min"] = lane_change_rate_per_min;
  j["lane_change_duration_s"] = lane_change_duration_s;
  j["position_noise_std"] = position_noise_std;
  j["speed_noise_std"] = speed_noise_std;
  j["speed_noise_tau_s"] = speed_noise_tau_s;
  j["initial_spacing_m"] = initial_spacing_m;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

std::vector<GeneratedTrack> generate(const HighwayConfig& cfg) {
  cfg.validate();
  const int n = cfg.vehicles;
  const double dt = cfg.frame_period_s;
  const std::int64_t frames = std::llround(cfg.duration_s / dt);
  if (frames < 2) throw Error(ErrKind::config, "config yields fewer than 2 frames");

  std::vector<VehicleState> veh(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto& st = veh[static_cast<std::size_t>(v)];
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(v), kParams);
    double u = rng.uniform();
    st.type = u < 0.8 ? scene::ObjectType::car
                      : (u < 0.95 ? scene::ObjectType::truck : scene::ObjectType::motorcycle);
    st.lane0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.lanes)));
    st.x0 = v * cfg.initial_spacing_m + rng.uniform(0.0, 0.5 * cfg.initial_spacing_m);
    st.base_speed = rng.uniform(cfg.speed_min, cfg.speed_max);
  }

  // Longitudinal truth first; it never depends on lane decisions.
  for (int v = 0; v < n; ++v) {
    auto& st = veh[static_cast<std::size_t>(v)];
    st.x.resize(static_cast<std::size_t>(frames));
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(v), kSpeed);
    double a = std::exp(-dt / cfg.speed_noise_tau_s);
    double q = cfg.speed_noise_std * std::sqrt(1.0 - a * a);
    double dv = cfg.speed_noise_std > 0.0 ? cfg.speed_noise_std * rng.normal() : 0.0;
    double x = st.x0;
    for (std::int64_t k = 0; k < frames; ++k) {
      st.x[static_cast<std::size_t>(k)] = x;
      x += (st.base_speed + dv) * dt;
      if (cfg.speed_noise_std > 0.0) dv = a * dv + q * rng.normal();
    }
  }

  // Lane-change schedule: per-vehicle Poisson event times drawn up front,
  // committed in global time order so suppression is deterministic.
  struct Event {
    double t;
    int vehicle;
    double dir_draw;
  };
  std::vector<Event> events;
  double rate_per_s = cfg.lane_change_rate_per_min / 60.0;
  if (rate_per_s > 0.0) {
    double horizon = cfg.duration_s - cfg.lane_change_duration_s;
    for (int v = 1; v < n; ++v) {  // vehicle 0 is the ego, fixed lane
      Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(v), kLaneChange);
      double t = 0.0;
      for (;;) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        t += -std::log(u) / rate_per_s;
        if (t >= horizon) break;
        events.push_back({t, v, rng.uniform()});
      }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
      if (a.t != b.t) return a.t < b.t;
      return a.vehicle < b.vehicle;
    });
  }

  auto frame_of = [&](double t) {
    return std::clamp<std::int64_t>(std::llround(t / dt), 0, frames - 1);
  };

  for (const Event& ev : events) {
    auto& st = veh[static_cast<std::size_t>(ev.vehicle)];
    if (!st.intervals.empty() && ev.t < st.intervals.back().end_s) continue;  // still mid-change
    int cur = st.intervals.empty() ? st.lane0 : st.intervals.back().to_lane;
    int dir = ev.dir_draw < 0.5 ? -1 : 1;
    int target = cur + dir;
    if (target < 0 || target >= cfg.lanes) target = cur - dir;
    if (target < 0 || target >= cfg.lanes) continue;
    // suppress when the target lane is occupied within 10 m
    std::int64_t kf = frame_of(ev.t);
    double x_self = st.x[static_cast<std::size_t>(kf)];
    bool occupied = false;
    for (int o = 0; o < n && !occupied; ++o) {
      if (o == ev.vehicle) continue;
      const auto& other = veh[static_cast<std::size_t>(o)];
      if (lane_at(other, ev.t) != target) continue;
      if (std::abs(other.x[static_cast<std::size_t>(kf)] - x_self) < 10.0) occupied = true;
    }
    if (occupied) continue;
    st.intervals.push_back({ev.t, ev.t + cfg.lane_change_duration_s, cur, target});
  }

  std::vector<GeneratedTrack> tracks(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto& st = veh[static_cast<std::size_t>(v)];
    auto& tr = tracks[static_cast<std::size_t>(v)];
    tr.id = v;
    tr.type = st.type;
    tr.is_ego = (v == 0);
    tr.lane_changes = st.intervals;
    tr.truth_x = st.x;
    tr.truth_y.resize(static_cast<std::size_t>(frames));
    tr.truth_lane.resize(static_cast<std::size_t>(frames));
    tr.frames.resize(static_cast<std::size_t>(frames));

    Rng noise = Rng::stream(cfg.seed, static_cast<std::uint64_t>(v), kNoise);
    for (std::int64_t k = 0; k < frames; ++k) {
      double t = static_cast<double>(k) * dt;
      tr.truth_y[static_cast<std::size_t>(k)] = lateral_at(st, t, cfg.lane_width);
      tr.truth_lane[static_cast<std::size_t>(k)] = lane_at(st, t);
    }
    for (std::int64_t k = 0; k < frames; ++k) {
      auto ks = static_cast<std::size_t>(k);
      auto& f = tr.frames[ks];
      f.t = static_cast<double>(k) * dt;
      f.id = v;
      f.x = tr.truth_x[ks];
      f.y = tr.truth_y[ks];
      if (cfg.position_noise_std > 0.0) {
        f.x += cfg.position_noise_std * noise.normal();
        f.y += cfg.position_noise_std * noise.normal();
      }
      // stored velocity/acceleration are forward differences of the truth
      std::size_t k1 = static_cast<std::size_t>(std::min(k + 1, frames - 1));
      std::size_t k0 = (k + 1 < frames) ? ks : ks - 1;
      f.vx = (tr.truth_x[k1] - tr.truth_x[k0]) / dt;
      f.vy = (tr.truth_y[k1] - tr.truth_y[k0]) / dt;
      f.p_car = tr.type == scene::ObjectType::car ? 1.0 : 0.0;
      f.p_truck = tr.type == scene::ObjectType::truck ? 1.0 : 0.0;
      f.p_moto = tr.type == scene::ObjectType::motorcycle ? 1.0 : 0.0;
      f.lane = tr.truth_lane[ks];
      f.lane_known = true;
      double center = lane_center(f.lane, cfg.lane_width);
      f.dl = center + 0.5 * cfg.lane_width - f.y;
      f.dr = f.y - (center - 0.5 * cfg.lane_width);
      f.is_ego = tr.is_ego;
    }
    for (std::int64_t k = 0; k < frames; ++k) {
      auto ks = static_cast<std::size_t>(k);
      std::size_t k1 = static_cast<std::size_t>(std::min(k + 1, frames - 1));
      std::size_t k0 = (k + 1 < frames) ? ks : ks - 1;
      tr.frames[ks].ax = (tr.frames[k1].vx - tr.frames[k0].vx) / dt;
      tr.frames[ks].ay = (tr.frames[k1].vy - tr.frames[k0].vy) / dt;
    }
  }
  return tracks;
}

void export_object_list(std::span<const GeneratedTrack> tracks,
                        const std::filesystem::path& path) {
  std::vector<data::ObjectFrame> rows;
  std::size_t total = 0;
  for (const auto& tr : tracks) total += tr.frames.size();
  rows.reserve(total);
  for (const auto& tr : tracks) rows.insert(rows.end(), tr.frames.begin(), tr.frames.end());
  data::write_object_list(path, rows);
}

}  // namespace holotraj::synth
