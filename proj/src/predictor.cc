#include "semclique/predictor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "absl/strings/str_cat.h"
#include "semclique/semantics.h"

namespace semclique {
namespace {

constexpr int kMaxPathDividers = 64;

// Mode m > 0 rotates by +ceil(m/2) * step (odd m) or -ceil(m/2) * step.
double ModeHeadingOffset(int mode, double step) {
  if (mode == 0) return 0.0;
  const int magnitude = (mode + 1) / 2;
  return (mode % 2 == 1 ? 1.0 : -1.0) * magnitude * step;
}

AgentState RotateMotion(const AgentState& s, double offset) {
  if (offset == 0.0) return s;
  AgentState out = s;
  const Vec2 v = Rotate(s.velocity(), offset);
  out.vx = v.x;
  out.vy = v.y;
  out.heading = NormalizeAngle(s.heading + offset);
  return out;
}

std::vector<TrajectoryMode> PerturbedModes(const AgentState& start,
                                           double step, int first_mode,
                                           int count, double dt, int steps,
                                           double yaw_rate) {
  std::vector<TrajectoryMode> modes;
  for (int m = first_mode; m < first_mode + count; ++m) {
    const AgentState s = RotateMotion(start, ModeHeadingOffset(m, step));
    modes.push_back({RolloutCtrv(s, yaw_rate, dt, steps), 0.0});
  }
  return modes;
}

void AssignConfidences(std::vector<TrajectoryMode>& modes,
                       const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  for (size_t m = 0; m < modes.size(); ++m) {
    modes[m].confidence = weights[m] / total;
  }
}

// Polyline path with cumulative arc length, extrapolated past both ends.
class PathWalker {
 public:
  explicit PathWalker(std::vector<Vec2> points) : points_(std::move(points)) {
    cumulative_.push_back(0.0);
    for (size_t i = 1; i < points_.size(); ++i) {
      cumulative_.push_back(cumulative_.back() +
                            Distance(points_[i - 1], points_[i]));
    }
  }

  // Position and unit tangent at arc length s.
  std::pair<Vec2, Vec2> At(double s) const {
    size_t seg = 0;
    while (seg + 2 < points_.size() && s > cumulative_[seg + 1]) ++seg;
    const Vec2 a = points_[seg];
    const Vec2 b = points_[seg + 1];
    const double len = cumulative_[seg + 1] - cumulative_[seg];
    const Vec2 tangent = (1.0 / len) * (b - a);
    return {a + (s - cumulative_[seg]) * tangent, tangent};
  }

 private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

double TangentAngle(Vec2 from, Vec2 to) {
  const Vec2 d = to - from;
  return std::atan2(d.y, d.x);
}

double HeadingChange(const TokenPolyline& from, const TokenPolyline& to) {
  const size_t n = from.points.size();
  const double a = TangentAngle(from.points[n - 2], from.points[n - 1]);
  const double b = TangentAngle(to.points[0], to.points[1]);
  return std::abs(NormalizeAngle(b - a));
}

// Successors of `id`, smallest heading change first, ties by id.
std::vector<const TokenPolyline*> RankedSuccessors(const TokenPolyline& from,
                                                   const SemanticMap& map) {
  std::vector<const TokenPolyline*> out;
  auto it = map.divider_successors.find(from.id);
  if (it == map.divider_successors.end()) return out;
  for (const std::string& id : it->second) {
    const TokenPolyline* next = map.Find(id);
    if (next != nullptr && next->points.size() >= 2) out.push_back(next);
  }
  std::sort(out.begin(), out.end(),
            [&](const TokenPolyline* a, const TokenPolyline* b) {
              const double ha = HeadingChange(from, *a);
              const double hb = HeadingChange(from, *b);
              if (ha != hb) return ha < hb;
              return a->id < b->id;
            });
  return out;
}

struct LanePath {
  std::vector<const TokenPolyline*> dividers;
  // Heading change taken at the first fork, 0 when there was none.
  double fork_heading_change = 0.0;
};

// Greedily extends `path` until it covers `needed` meters of arc length.
void ExtendGreedy(LanePath& path, double covered, double needed,
                  const SemanticMap& map) {
  while (covered < needed &&
         static_cast<int>(path.dividers.size()) < kMaxPathDividers) {
    const std::vector<const TokenPolyline*> next =
        RankedSuccessors(*path.dividers.back(), map);
    if (next.empty()) return;
    path.dividers.push_back(next.front());
    covered += next.front()->Length();
  }
}

std::vector<LanePath> EnumerateBranches(const TokenPolyline& start,
                                        double needed,
                                        const SemanticMap& map) {
  LanePath trunk;
  trunk.dividers.push_back(&start);
  double covered = start.Length();
  while (covered < needed &&
         static_cast<int>(trunk.dividers.size()) < kMaxPathDividers) {
    const std::vector<const TokenPolyline*> next =
        RankedSuccessors(*trunk.dividers.back(), map);
    if (next.empty()) break;
    if (next.size() == 1) {
      trunk.dividers.push_back(next.front());
      covered += next.front()->Length();
      continue;
    }
    std::vector<LanePath> branches;
    for (const TokenPolyline* option : next) {
      LanePath branch = trunk;
      branch.fork_heading_change =
          HeadingChange(*trunk.dividers.back(), *option);
      branch.dividers.push_back(option);
      ExtendGreedy(branch, covered + option->Length(), needed, map);
      branches.push_back(std::move(branch));
    }
    return branches;
  }
  return {trunk};
}

std::vector<AgentState> WalkPath(const LanePath& path, double s0,
                                 double speed, double dt, int steps) {
  std::vector<Vec2> points;
  for (const TokenPolyline* d : path.dividers) {
    for (const Vec2& p : d->points) {
      if (points.empty() || !(points.back() == p)) points.push_back(p);
    }
  }
  const PathWalker walker(std::move(points));
  std::vector<AgentState> states;
  states.reserve(steps);
  for (int k = 1; k <= steps; ++k) {
    const auto [p, tangent] = walker.At(s0 + speed * (k * dt));
    AgentState s;
    s.x = p.x;
    s.y = p.y;
    s.heading = NormalizeAngle(std::atan2(tangent.y, tangent.x));
    s.vx = speed * tangent.x;
    s.vy = speed * tangent.y;
    states.push_back(s);
  }
  return states;
}

// Arc length of the closest point of `p` on the polyline.
double ProjectArcLength(const TokenPolyline& poly, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double offset = 0.0;
  for (size_t k = 0; k < poly.segment_count(); ++k) {
    const Segment seg = poly.segment(k);
    const double u = ProjectParam(seg, p);
    const double len = Distance(seg.start, seg.end);
    const double d = Distance(p, seg.start + u * (seg.end - seg.start));
    if (d < best) {
      best = d;
      best_s = offset + u * len;
    }
    offset += len;
  }
  return best_s;
}

}  // namespace

std::vector<AgentState> RolloutCv(const AgentState& start, double dt,
                                  int steps) {
  std::vector<AgentState> states;
  states.reserve(steps);
  for (int k = 1; k <= steps; ++k) {
    AgentState s = start;
    s.x = start.x + (k * dt) * start.vx;
    s.y = start.y + (k * dt) * start.vy;
    states.push_back(s);
  }
  return states;
}

std::vector<AgentState> RolloutCtrv(const AgentState& start, double yaw_rate,
                                    double dt, int steps) {
  if (yaw_rate == 0.0) return RolloutCv(start, dt, steps);
  std::vector<AgentState> states;
  states.reserve(steps);
  const Vec2 v0 = start.velocity();
  for (int k = 1; k <= steps; ++k) {
    const double t = k * dt;
    const double wt = yaw_rate * t;
    const double s = std::sin(wt);
    const double c1 = 1.0 - std::cos(wt);
    // Integral of R(w tau) v0 over [0, t].
    const Vec2 disp{(s * v0.x - c1 * v0.y) / yaw_rate,
                    (c1 * v0.x + s * v0.y) / yaw_rate};
    const Vec2 v = Rotate(v0, wt);
    AgentState out;
    out.x = start.x + disp.x;
    out.y = start.y + disp.y;
    out.heading = NormalizeAngle(start.heading + wt);
    out.vx = v.x;
    out.vy = v.y;
    states.push_back(out);
  }
  return states;
}

std::vector<double> GeometricConfidences(int n) {
  std::vector<double> weights;
  double w = 1.0;
  for (int m = 0; m < n; ++m) {
    weights.push_back(w);
    w *= 0.5;
  }
  double total = 0.0;
  for (double x : weights) total += x;
  for (double& x : weights) x /= total;
  return weights;
}

absl::Status CheckPredictionSet(const PredictionSet& set, const Clique& clique,
                                int n_modes, int steps) {
  for (const std::string& id : clique.member_ids) {
    auto it = set.modes.find(id);
    if (it == set.modes.end()) {
      return absl::NotFoundError(absl::StrCat("no prediction for ", id));
    }
    if (static_cast<int>(it->second.size()) != n_modes) {
      return absl::InternalError(absl::StrCat(id, " has ", it->second.size(),
                                              " modes, expected ", n_modes));
    }
    double total = 0.0;
    for (const TrajectoryMode& mode : it->second) {
      if (!(mode.confidence >= 0.0 && mode.confidence <= 1.0)) {
        return absl::InternalError(
            absl::StrCat(id, " has confidence outside [0, 1]"));
      }
      if (static_cast<int>(mode.states.size()) != steps) {
        return absl::InternalError(absl::StrCat(
            id, " mode has ", mode.states.size(), " states, expected ", steps));
      }
      total += mode.confidence;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      return absl::InternalError(
          absl::StrCat(id, " confidences sum to ", total));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<PredictionSet> PerAgentPredictor::Predict(
    const Clique& clique, const Scene& scene, int n_modes) const {
  if (n_modes < 1) {
    return absl::InvalidArgumentError("n_modes must be >= 1");
  }
  const int steps = scene.HorizonSteps();
  PredictionSet out;
  for (const std::string& id : clique.member_ids) {
    const SceneAgent* agent = scene.FindAgent(id);
    if (agent == nullptr) {
      return absl::NotFoundError(absl::StrCat("unknown agent '", id, "'"));
    }
    if (agent->history.StateAt(clique.timestep_index) == nullptr) {
      return absl::FailedPreconditionError(absl::StrCat(
          "agent '", id, "' has no state at ", clique.timestep_index));
    }
    AgentForecast forecast =
        PredictAgent(*agent, clique.timestep_index, scene, n_modes, steps);
    if (forecast.fallback) out.fallback_agents.insert(id);
    out.modes[id] = std::move(forecast.modes);
  }
  return out;
}

PerAgentPredictor::AgentForecast CvPredictor::PredictAgent(
    const SceneAgent& agent, int timestep, const Scene& scene, int n_modes,
    int steps) const {
  const AgentState& current = *agent.history.StateAt(timestep);
  AgentForecast forecast;
  forecast.modes = PerturbedModes(current, config().heading_step, 0, n_modes,
                                  scene.dt, steps, 0.0);
  AssignConfidences(forecast.modes, GeometricConfidences(n_modes));
  return forecast;
}

PerAgentPredictor::AgentForecast CtrvPredictor::PredictAgent(
    const SceneAgent& agent, int timestep, const Scene& scene, int n_modes,
    int steps) const {
  const AgentState& current = *agent.history.StateAt(timestep);
  const AgentState* previous = agent.history.StateAt(timestep - 1);
  AgentForecast forecast;
  double yaw_rate = 0.0;
  if (agent.type.kind != AgentKind::kVehicle || previous == nullptr) {
    forecast.fallback = true;
  } else {
    yaw_rate = NormalizeAngle(current.heading - previous->heading) / scene.dt;
  }
  forecast.modes = PerturbedModes(current, config().heading_step, 0, n_modes,
                                  scene.dt, steps, yaw_rate);
  AssignConfidences(forecast.modes, GeometricConfidences(n_modes));
  return forecast;
}

PerAgentPredictor::AgentForecast LaneFollowPredictor::PredictAgent(
    const SceneAgent& agent, int timestep, const Scene& scene, int n_modes,
    int steps) const {
  const AgentState& current = *agent.history.StateAt(timestep);
  std::optional<std::string> lane;
  if (agent.type.kind == AgentKind::kVehicle) {
    lane = AssociateLane(current, scene.map, config().association_radius);
  }
  if (!lane.has_value()) {
    AgentForecast forecast;
    forecast.fallback = true;
    forecast.modes = PerturbedModes(current, config().heading_step, 0,
                                    n_modes, scene.dt, steps, 0.0);
    AssignConfidences(forecast.modes, GeometricConfidences(n_modes));
    return forecast;
  }

  const TokenPolyline& start = *scene.map.Find(*lane);
  const double s0 = ProjectArcLength(start, current.position());
  const double speed = current.speed();
  const double needed = s0 + speed * steps * scene.dt;
  std::vector<LanePath> branches = EnumerateBranches(start, needed, scene.map);
  if (static_cast<int>(branches.size()) > n_modes) branches.resize(n_modes);

  AgentForecast forecast;
  std::vector<double> weights;
  double smallest = 1.0;
  for (const LanePath& branch : branches) {
    forecast.modes.push_back(
        {WalkPath(branch, s0, speed, scene.dt, steps), 0.0});
    const double w =
        std::max(0.5 * (1.0 + std::cos(branch.fork_heading_change)), 1e-6);
    weights.push_back(w);
    smallest = std::min(smallest, w);
  }
  const int missing = n_modes - static_cast<int>(branches.size());
  if (missing > 0) {
    std::vector<TrajectoryMode> fill = PerturbedModes(
        current, config().heading_step, 1, missing, scene.dt, steps, 0.0);
    double w = smallest;
    for (TrajectoryMode& mode : fill) {
      w *= 0.5;
      weights.push_back(w);
      forecast.modes.push_back(std::move(mode));
    }
  }
  AssignConfidences(forecast.modes, weights);
  return forecast;
}

absl::StatusOr<std::unique_ptr<Predictor>> MakePredictor(
    std::string_view name, PredictorConfig config) {
  if (name == "cv") return std::make_unique<CvPredictor>(config);
  if (name == "ctrv") return std::make_unique<CtrvPredictor>(config);
  if (name == "lane") return std::make_unique<LaneFollowPredictor>(config);
  return absl::InvalidArgumentError(
      absl::StrCat("unknown predictor '", std::string(name), "' (valid: cv, ctrv, lane)"));
}

}  // namespace semclique
