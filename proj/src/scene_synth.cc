#include "semclique/scene_synth.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"

namespace semclique {
namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// draws are derived from raw engine output.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double Uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int UniformInt(int lo, int hi) {  // inclusive
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  bool Bernoulli(double p) { return Uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 engine_;
};

using FutureFn = std::function<AgentState(double t)>;

class SceneBuilder {
 public:
  explicit SceneBuilder(const ScenarioParams& params) : params_(params) {
    scene_.dt = params.dt;
    scene_.horizon = params.horizon;
  }

  // Current state sits at index history_steps; the history runs backwards at
  // constant velocity and the ground truth is `future` (CV when empty).
  void AddAgent(const std::string& id, AgentKind kind, Vec2 p, Vec2 v,
                FutureFn future = nullptr) {
    const double heading =
        v.SquaredNorm() > 0.0 ? std::atan2(v.y, v.x) : 0.0;
    AddAgent(id, kind, p, v, heading, std::move(future));
  }

  void AddAgent(const std::string& id, AgentKind kind, Vec2 p, Vec2 v,
                double heading, FutureFn future = nullptr) {
    const int h = params_.history_steps;
    const double dt = params_.dt;
    SceneAgent agent;
    agent.id = id;
    agent.type = AgentType::Default(kind);
    agent.history.agent_id = id;
    agent.history.dt = dt;
    const AgentState now{p.x, p.y, NormalizeAngle(heading), v.x, v.y};
    for (int k = 0; k <= h; ++k) {
      AgentState s = now;
      const double back = (h - k) * dt;
      s.x = p.x - back * v.x;
      s.y = p.y - back * v.y;
      agent.history.states.push_back({k, s});
    }
    TrajectoryHistory gt;
    gt.agent_id = id;
    gt.dt = dt;
    for (int k = 1; k <= scene_.HorizonSteps(); ++k) {
      const double t = k * dt;
      AgentState s = now;
      if (future) {
        s = future(t);
      } else {
        s.x = p.x + t * v.x;
        s.y = p.y + t * v.y;
      }
      gt.states.push_back({h + k, s});
    }
    scene_.ground_truth[id] = std::move(gt);
    scene_.agents.push_back(std::move(agent));
  }

  void AddPolyline(const std::string& id, PolylineKind kind,
                   std::vector<Vec2> points) {
    scene_.map.polylines.push_back({id, kind, std::move(points)});
  }

  Scene Finish() {
    scene_.map.divider_successors =
        SuccessorsFromSharedTokens(scene_.map.polylines);
    scene_.map.bounds = ComputeBounds(scene_.map.polylines, 10.0);
    std::sort(scene_.agents.begin(), scene_.agents.end(),
              [](const SceneAgent& a, const SceneAgent& b) {
                return a.id < b.id;
              });
    return std::move(scene_);
  }

 private:
  ScenarioParams params_;
  Scene scene_;
};

// Moves at constant velocity until `stop_time`, then stands still.
FutureFn StopAt(Vec2 p, Vec2 v, double heading, double stop_time) {
  return [=](double t) {
    const double moving = std::min(t, stop_time);
    AgentState s{p.x + moving * v.x, p.y + moving * v.y, heading, 0.0, 0.0};
    if (t < stop_time) {
      s.vx = v.x;
      s.vy = v.y;
    }
    return s;
  };
}

Scene Diverging(uint64_t seed, const ScenarioParams& params) {
  Rng rng(seed);
  const double j = params.jitter;
  auto jit = [&](Vec2 p) {
    return Vec2{p.x + rng.Uniform(-j, j), p.y + rng.Uniform(-j, j)};
  };
  SceneBuilder b(params);
  b.AddAgent("A", AgentKind::kVehicle, jit({0.0, 0.0}), {5.0, 0.0});
  b.AddAgent("B", AgentKind::kVehicle, jit({12.0, 0.0}), {-5.0, 0.0});
  b.AddAgent("C", AgentKind::kVehicle, jit({-8.0, 0.0}), {-5.0, 0.0});
  b.AddAgent("D", AgentKind::kVehicle, jit({0.0, 8.0}), {0.0, 5.0});
  return b.Finish();
}

Scene DistanceRing(uint64_t seed, const ScenarioParams& params) {
  Rng rng(seed);
  const double j = params.jitter;
  const double d0 = AgentType::Default(AgentKind::kVehicle).d0;
  auto jit = [&](Vec2 p) {
    return Vec2{p.x + rng.Uniform(-j, j), p.y + rng.Uniform(-j, j)};
  };
  SceneBuilder b(params);
  b.AddAgent("A", AgentKind::kVehicle, jit({0.0, 0.0}), {0.0, 0.0});
  b.AddAgent("B", AgentKind::kVehicle, jit({0.5 * d0, 0.0}), {-3.0, 0.0});
  b.AddAgent("C", AgentKind::kVehicle, jit({0.0, 0.75 * d0}), {0.0, -4.0});
  b.AddAgent("E", AgentKind::kVehicle, jit({-1.5 * d0, 0.0}), {0.0, 0.0});
  return b.Finish();
}

Scene DividedRoad(uint64_t seed, const ScenarioParams& params) {
  Rng rng(seed);
  const double j = params.jitter;
  auto jit = [&](Vec2 p) {
    return Vec2{p.x + rng.Uniform(-j, j), p.y + rng.Uniform(-0.6 * j, 0.6 * j)};
  };
  SceneBuilder b(params);
  b.AddPolyline("median", PolylineKind::kBarrier, {{-100.0, 0.0}, {100.0, 0.0}});
  b.AddAgent("A", AgentKind::kVehicle, jit({0.0, -2.0}), {5.0, 0.0});
  b.AddAgent("C", AgentKind::kVehicle, jit({-10.0, -2.0}), {8.0, 0.0});
  b.AddAgent("B", AgentKind::kVehicle, jit({8.0, 2.0}), {-5.0, 0.0});
  b.AddAgent("D", AgentKind::kVehicle, jit({18.0, 2.0}), {-8.0, 0.0});
  return b.Finish();
}

Scene LaneMerge(uint64_t seed, const ScenarioParams& params) {
  Rng rng(seed);
  const double j = params.jitter;
  SceneBuilder b(params);
  const Vec2 ramp_start{-60.0, -12.0};
  const Vec2 merge{0.0, 0.0};
  b.AddPolyline("m1", PolylineKind::kLaneDivider, {{-100.0, 0.0}, merge});
  b.AddPolyline("m2", PolylineKind::kLaneDivider, {merge, {100.0, 0.0}});
  b.AddPolyline("r1", PolylineKind::kLaneDivider, {ramp_start, merge});
  b.AddPolyline("p1", PolylineKind::kLaneDivider, {{-100.0, 4.0}, {100.0, 4.0}});

  const double speed = 10.0;
  b.AddAgent("A", AgentKind::kVehicle, {-20.0 + rng.Uniform(-j, j), 0.0},
             {speed, 0.0});
  const Vec2 ramp_dir = (1.0 / Distance(ramp_start, merge)) * (merge - ramp_start);
  // Along the ramp, 17 m of x before the merge point.
  const double along = (17.0 / ramp_dir.x) + rng.Uniform(-j, j);
  b.AddAgent("B", AgentKind::kVehicle, merge - along * ramp_dir,
             speed * ramp_dir);
  b.AddAgent("C", AgentKind::kVehicle, {-20.0 + rng.Uniform(-j, j), 4.0},
             {speed, 0.0});
  return b.Finish();
}

Scene Crossing(uint64_t seed, const ScenarioParams& params) {
  Rng rng(seed);
  SceneBuilder b(params);
  const auto lane = PolylineKind::kLaneDivider;
  b.AddPolyline("E_in", lane, {{-300.0, -2.0}, {-6.0, -2.0}});
  b.AddPolyline("E_thru", lane, {{-6.0, -2.0}, {6.0, -2.0}});
  b.AddPolyline("E_out", lane, {{6.0, -2.0}, {80.0, -2.0}});
  b.AddPolyline("E_left", lane,
                {{-6.0, -2.0}, {-1.0, -1.0}, {1.5, 2.5}, {2.0, 6.0}});
  b.AddPolyline("N_in", lane, {{2.0, -300.0}, {2.0, -6.0}});
  b.AddPolyline("N_thru", lane, {{2.0, -6.0}, {2.0, 6.0}});
  b.AddPolyline("N_out", lane, {{2.0, 6.0}, {2.0, 80.0}});
  b.AddPolyline("N_right", lane, {{2.0, -6.0}, {2.8, -3.2}, {6.0, -2.0}});

  const int count =
      params.agent_count > 0 ? params.agent_count : 6 + static_cast<int>(seed % 3);
  std::vector<double> taken[2];
  for (int i = 0; i < count; ++i) {
    const int approach = rng.UniformInt(0, 1);
    double s = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      s = rng.Uniform(5.0, 45.0 + 4.0 * count);
      const bool clear = std::none_of(
          taken[approach].begin(), taken[approach].end(),
          [&](double other) { return std::abs(other - s) < 8.0; });
      if (clear) break;
    }
    taken[approach].push_back(s);
    const double speed = rng.Uniform(4.0, 12.0);
    const std::string id = absl::StrFormat("v%03d", i);
    if (approach == 0) {
      b.AddAgent(id, AgentKind::kVehicle, {-6.0 - s, -2.0}, {speed, 0.0});
    } else {
      b.AddAgent(id, AgentKind::kVehicle, {2.0, -6.0 - s}, {0.0, speed});
    }
  }
  return b.Finish();
}

Scene Mixed(uint64_t seed, const ScenarioParams& params) {
  Rng rng(seed);
  SceneBuilder b(params);
  b.AddPolyline("east", PolylineKind::kLaneDivider, {{-100.0, -2.0}, {100.0, -2.0}});
  b.AddPolyline("west", PolylineKind::kLaneDivider, {{100.0, 2.0}, {-100.0, 2.0}});
  b.AddPolyline("curb", PolylineKind::kBarrier, {{-100.0, -5.0}, {100.0, -5.0}});

  const int count = params.agent_count > 0 ? params.agent_count : 7;
  const int vehicles = std::max(1, (count * 4) / 7);
  std::vector<double> taken[2];
  for (int i = 0; i < vehicles; ++i) {
    const int dir = i % 2;  // 0 east, 1 west
    double x = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      x = rng.Uniform(-40.0, 20.0);
      const bool clear =
          std::none_of(taken[dir].begin(), taken[dir].end(),
                       [&](double other) { return std::abs(other - x) < 10.0; });
      if (clear) break;
    }
    taken[dir].push_back(x);
    const double speed = rng.Uniform(6.0, 12.0);
    const Vec2 p{x, dir == 0 ? -2.0 : 2.0};
    const Vec2 v{dir == 0 ? speed : -speed, 0.0};
    const std::string id = absl::StrFormat("v%03d", i);
    if (i == 0) {
      b.AddAgent(id, AgentKind::kVehicle, p, v,
                 StopAt(p, v, 0.0, 0.5 * params.horizon));
    } else {
      b.AddAgent(id, AgentKind::kVehicle, p, v);
    }
  }
  for (int i = 0; i < count - vehicles; ++i) {
    const Vec2 p{rng.Uniform(-20.0, 20.0), rng.Uniform(-8.5, -6.5)};
    const double speed = rng.Uniform(1.0, 1.6);
    const Vec2 v{rng.Bernoulli(0.5) ? speed : -speed, 0.0};
    b.AddAgent(absl::StrFormat("p%03d", i), AgentKind::kPedestrian, p, v);
  }
  return b.Finish();
}

Scene RandomScene(uint64_t seed, const ScenarioParams& params) {
  Rng rng(seed);
  SceneBuilder b(params);
  const int count = params.agent_count > 0 ? params.agent_count : 24;
  // Keeps density roughly constant as the count grows.
  const double side = 40.0 * std::ceil(0.5 * std::sqrt(count));
  const auto lane = PolylineKind::kLaneDivider;

  // Horizontal lanes every 20 m, alternating direction, cut into 40 m pieces.
  int row = 0;
  for (double y = 0.0; y <= side; y += 20.0, ++row) {
    const bool east = row % 2 == 0;
    for (double x = 0.0; x < side; x += 40.0) {
      const Vec2 a{x, y}, c{x + 40.0, y};
      b.AddPolyline(absl::StrFormat("h%03d_%03d", row, static_cast<int>(x / 40)),
                    lane, east ? std::vector<Vec2>{a, c} : std::vector<Vec2>{c, a});
    }
  }
  // Vertical lanes every 40 m, 40 m pieces, sharing tokens with the rows.
  int col = 0;
  for (double x = 0.0; x <= side; x += 40.0, ++col) {
    const bool north = col % 2 == 0;
    for (double y = 0.0; y < side; y += 40.0) {
      const Vec2 a{x, y}, c{x, y + 40.0};
      b.AddPolyline(absl::StrFormat("c%03d_%03d", col, static_cast<int>(y / 40)),
                    lane, north ? std::vector<Vec2>{a, c} : std::vector<Vec2>{c, a});
    }
  }
  const int barriers = count / 10 + 1;
  for (int i = 0; i < barriers; ++i) {
    std::vector<Vec2> points{{rng.Uniform(0.0, side), rng.Uniform(0.0, side)}};
    const int extra = rng.UniformInt(1, 3);
    for (int k = 0; k < extra; ++k) {
      const double angle = rng.Uniform(-std::numbers::pi, std::numbers::pi);
      points.push_back(points.back() + rng.Uniform(5.0, 25.0) * UnitFromAngle(angle));
    }
    b.AddPolyline(absl::StrFormat("b%03d", i), PolylineKind::kBarrier,
                  std::move(points));
  }
  for (int i = 0; i < count; ++i) {
    const bool pedestrian = rng.Bernoulli(0.2);
    const Vec2 p{rng.Uniform(0.0, side), rng.Uniform(0.0, side)};
    const double heading = rng.Uniform(-std::numbers::pi, std::numbers::pi);
    const double speed =
        pedestrian ? rng.Uniform(0.0, 2.0) : rng.Uniform(0.0, 12.0);
    const std::string id =
        absl::StrCat(pedestrian ? "p" : "v", absl::StrFormat("%04d", i));
    b.AddAgent(id, pedestrian ? AgentKind::kPedestrian : AgentKind::kVehicle,
               p, speed * UnitFromAngle(heading), heading);
  }
  return b.Finish();
}

}  // namespace

std::string_view ScenarioKindName(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kDiverging:
      return "diverging";
    case ScenarioKind::kDistanceRing:
      return "distance-ring";
    case ScenarioKind::kDividedRoad:
      return "divided-road";
    case ScenarioKind::kLaneMerge:
      return "lane-merge";
    case ScenarioKind::kCrossing:
      return "crossing";
    case ScenarioKind::kMixed:
      return "mixed";
    case ScenarioKind::kRandom:
      return "random";
  }
  return "unknown";
}

const std::vector<ScenarioKind>& AllScenarioKinds() {
  static const std::vector<ScenarioKind> kinds = {
      ScenarioKind::kDiverging, ScenarioKind::kDistanceRing,
      ScenarioKind::kDividedRoad, ScenarioKind::kLaneMerge,
      ScenarioKind::kCrossing, ScenarioKind::kMixed, ScenarioKind::kRandom};
  return kinds;
}

std::optional<ScenarioKind> ParseScenarioKind(std::string_view name) {
  for (ScenarioKind kind : AllScenarioKinds()) {
    if (ScenarioKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string ScenarioKindList() {
  std::vector<std::string> names;
  for (ScenarioKind kind : AllScenarioKinds()) {
    names.emplace_back(ScenarioKindName(kind));
  }
  return absl::StrJoin(names, ", ");
}

absl::StatusOr<Scene> GenScenario(ScenarioKind kind, uint64_t seed,
                                  const ScenarioParams& params) {
  if (params.history_steps < 0) {
    return absl::InvalidArgumentError("history_steps must be >= 0");
  }
  if (!(params.dt > 0.0) || !(params.horizon >= params.dt)) {
    return absl::InvalidArgumentError("need dt > 0 and horizon >= dt");
  }
  if (!(params.jitter >= 0.0 && params.jitter <= 0.5)) {
    return absl::InvalidArgumentError("jitter must lie in [0, 0.5]");
  }
  if (params.agent_count < 0 || params.agent_count > 100000) {
    return absl::InvalidArgumentError("agent_count must lie in [0, 100000]");
  }
  switch (kind) {
    case ScenarioKind::kDiverging:
      return Diverging(seed, params);
    case ScenarioKind::kDistanceRing:
      return DistanceRing(seed, params);
    case ScenarioKind::kDividedRoad:
      return DividedRoad(seed, params);
    case ScenarioKind::kLaneMerge:
      return LaneMerge(seed, params);
    case ScenarioKind::kCrossing:
      return Crossing(seed, params);
    case ScenarioKind::kMixed:
      return Mixed(seed, params);
    case ScenarioKind::kRandom:
      return RandomScene(seed, params);
  }
  return absl::InvalidArgumentError("unknown scenario kind");
}

absl::StatusOr<Scene> GenScenario(std::string_view kind, uint64_t seed,
                                  const ScenarioParams& params) {
  const std::optional<ScenarioKind> parsed = ParseScenarioKind(kind);
  if (!parsed.has_value()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown scenario kind '", std::string(kind),
        "'; valid kinds: ", ScenarioKindList()));
  }
  return GenScenario(*parsed, seed, params);
}

}  // namespace semclique
