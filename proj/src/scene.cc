#include "semclique/scene.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <set>

#include "absl/strings/str_cat.h"

namespace semclique {
namespace {

bool Finite(const AgentState& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) &&
         std::isfinite(s.heading) && std::isfinite(s.vx) &&
         std::isfinite(s.vy);
}

void CheckTrajectory(const TrajectoryHistory& traj, double scene_dt,
                     const std::string& entity, std::vector<Violation>* out) {
  if (traj.states.empty()) {
    out->push_back({entity, "trajectory needs >= 1 state"});
    return;
  }
  if (traj.dt != scene_dt) {
    out->push_back({entity, "trajectory dt differs from scene dt"});
  }
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const TimedState& ts = traj.states[i];
    if (i > 0 && ts.index != traj.states[i - 1].index + 1) {
      out->push_back(
          {entity, absl::StrCat("timestep indices must increase by exactly 1 "
                                "(at index ",
                                ts.index, ")")});
    }
    if (!Finite(ts.state)) {
      out->push_back(
          {entity, absl::StrCat("non-finite state at index ", ts.index)});
    } else if (!(ts.state.heading > -std::numbers::pi &&
                 ts.state.heading <= std::numbers::pi)) {
      out->push_back(
          {entity, absl::StrCat("heading outside (-pi, pi] at index ",
                                ts.index)});
    }
  }
}

}  // namespace

std::string_view AgentKindName(AgentKind kind) {
  switch (kind) {
    case AgentKind::kVehicle:
      return "vehicle";
    case AgentKind::kPedestrian:
      return "pedestrian";
  }
  return "unknown";
}

std::optional<AgentKind> ParseAgentKind(std::string_view name) {
  if (name == "vehicle") return AgentKind::kVehicle;
  if (name == "pedestrian") return AgentKind::kPedestrian;
  return std::nullopt;
}

AgentType AgentType::Default(AgentKind kind) {
  switch (kind) {
    case AgentKind::kVehicle:
      return {AgentKind::kVehicle, 2.0, 20.0};
    case AgentKind::kPedestrian:
      return {AgentKind::kPedestrian, 0.5, 10.0};
  }
  return {};
}

double NormalizeAngle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

const AgentState* TrajectoryHistory::StateAt(int index) const {
  if (states.empty()) return nullptr;
  const long offset = static_cast<long>(index) - states.front().index;
  if (offset < 0 || offset >= static_cast<long>(states.size())) {
    return nullptr;
  }
  const TimedState& ts = states[offset];
  return ts.index == index ? &ts.state : nullptr;
}

std::string_view PolylineKindName(PolylineKind kind) {
  switch (kind) {
    case PolylineKind::kBarrier:
      return "barrier";
    case PolylineKind::kLaneDivider:
      return "lane_divider";
  }
  return "unknown";
}

std::optional<PolylineKind> ParsePolylineKind(std::string_view name) {
  if (name == "barrier") return PolylineKind::kBarrier;
  if (name == "lane_divider") return PolylineKind::kLaneDivider;
  return std::nullopt;
}

double TokenPolyline::Length() const {
  double total = 0.0;
  for (size_t i = 0; i < segment_count(); ++i) {
    total += Distance(points[i], points[i + 1]);
  }
  return total;
}

const TokenPolyline* SemanticMap::Find(std::string_view id) const {
  for (const TokenPolyline& p : polylines) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::map<std::string, std::vector<std::string>> SuccessorsFromSharedTokens(
    const std::vector<TokenPolyline>& polylines) {
  std::map<std::string, std::vector<std::string>> successors;
  for (const TokenPolyline& a : polylines) {
    if (a.kind != PolylineKind::kLaneDivider || a.points.empty()) continue;
    std::vector<std::string> next;
    for (const TokenPolyline& b : polylines) {
      if (&a == &b || b.kind != PolylineKind::kLaneDivider ||
          b.points.empty()) {
        continue;
      }
      if (a.points.back() == b.points.front()) next.push_back(b.id);
    }
    if (!next.empty()) {
      std::sort(next.begin(), next.end());
      successors[a.id] = std::move(next);
    }
  }
  return successors;
}

Bounds ComputeBounds(const std::vector<TokenPolyline>& polylines,
                     double margin) {
  bool any = false;
  Bounds b;
  for (const TokenPolyline& p : polylines) {
    for (const Vec2& v : p.points) {
      if (!any) {
        b = {v.x, v.y, v.x, v.y};
        any = true;
        continue;
      }
      b.min_x = std::min(b.min_x, v.x);
      b.min_y = std::min(b.min_y, v.y);
      b.max_x = std::max(b.max_x, v.x);
      b.max_y = std::max(b.max_y, v.y);
    }
  }
  if (!any) return {};
  return {b.min_x - margin, b.min_y - margin, b.max_x + margin,
          b.max_y + margin};
}

const SceneAgent* Scene::FindAgent(std::string_view id) const {
  for (const SceneAgent& a : agents) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

std::vector<int> Scene::TimestepIndices() const {
  std::set<int> indices;
  for (const SceneAgent& a : agents) {
    for (const TimedState& ts : a.history.states) indices.insert(ts.index);
  }
  return {indices.begin(), indices.end()};
}

int Scene::HorizonSteps() const {
  if (!(dt > 0.0) || !(horizon > 0.0)) return 0;
  return static_cast<int>(std::floor(horizon / dt + 1e-9));
}

SceneGraph::SceneGraph(int timestep_index, std::vector<std::string> agent_ids)
    : timestep_index_(timestep_index), agent_ids_(std::move(agent_ids)) {
  std::sort(agent_ids_.begin(), agent_ids_.end());
  alpha_.assign(agent_ids_.size() * agent_ids_.size(), 0.0);
}

void SceneGraph::SetAlpha(size_t i, size_t j, double w) {
  assert(i != j);
  assert(std::isfinite(w) && w >= 0.0);
  if (i == j || !std::isfinite(w) || w < 0.0) return;
  alpha_[i * size() + j] = w;
  alpha_[j * size() + i] = w;
}

std::optional<size_t> SceneGraph::IndexOf(std::string_view id) const {
  auto it = std::lower_bound(agent_ids_.begin(), agent_ids_.end(), id);
  if (it == agent_ids_.end() || *it != id) return std::nullopt;
  return static_cast<size_t>(it - agent_ids_.begin());
}

size_t SceneGraph::EdgeCount(double threshold) const {
  size_t count = 0;
  for (size_t i = 0; i < size(); ++i) {
    for (size_t j = i + 1; j < size(); ++j) {
      if (alpha(i, j) > threshold) ++count;
    }
  }
  return count;
}

size_t LocalMap::CountSet(int channel) const {
  size_t count = 0;
  for (size_t i = channel; i < cells.size(); i += channels) {
    if (cells[i] != 0) ++count;
  }
  return count;
}

std::vector<Violation> ValidateScene(const Scene& scene) {
  std::vector<Violation> out;
  if (!(scene.dt > 0.0) || !std::isfinite(scene.dt)) {
    out.push_back({"scene", "dt must be positive"});
  }
  if (!(scene.horizon > 0.0) || !std::isfinite(scene.horizon)) {
    out.push_back({"scene", "horizon must be positive"});
  }

  std::set<std::string> seen;
  for (const SceneAgent& agent : scene.agents) {
    if (!seen.insert(agent.id).second) {
      out.push_back({agent.id, "duplicate agent_id"});
    }
    if (!(agent.type.footprint_radius > 0.0)) {
      out.push_back({agent.id, "footprint_radius must be positive"});
    }
    if (!(agent.type.d0 > 0.0)) {
      out.push_back({agent.id, "d0 must be positive"});
    }
    if (agent.history.agent_id != agent.id) {
      out.push_back({agent.id, "history agent_id does not match agent"});
    }
    CheckTrajectory(agent.history, scene.dt, agent.id, &out);
  }

  std::set<std::string> polyline_ids;
  for (const TokenPolyline& p : scene.map.polylines) {
    if (!polyline_ids.insert(p.id).second) {
      out.push_back({p.id, "duplicate polyline id"});
    }
    if (p.points.size() < 2) {
      out.push_back({p.id, "polyline needs >= 2 points"});
    }
    for (size_t i = 0; i < p.points.size(); ++i) {
      if (!std::isfinite(p.points[i].x) || !std::isfinite(p.points[i].y)) {
        out.push_back({p.id, absl::StrCat("non-finite point ", i)});
      }
      if (i > 0 && p.points[i] == p.points[i - 1]) {
        out.push_back(
            {p.id, absl::StrCat("consecutive points ", i - 1, " and ", i,
                                " coincide")});
      }
    }
  }

  for (const auto& [id, next] : scene.map.divider_successors) {
    const TokenPolyline* from = scene.map.Find(id);
    if (from == nullptr) {
      out.push_back({id, "successor key names an unknown polyline"});
    } else if (from->kind != PolylineKind::kLaneDivider) {
      out.push_back({id, "successor key is not a lane divider"});
    }
    for (const std::string& to_id : next) {
      const TokenPolyline* to = scene.map.Find(to_id);
      if (to == nullptr) {
        out.push_back({id, absl::StrCat("successor ", to_id, " is unknown")});
      } else if (to->kind != PolylineKind::kLaneDivider) {
        out.push_back(
            {id, absl::StrCat("successor ", to_id, " is not a lane divider")});
      }
    }
  }

  for (const auto& [id, traj] : scene.ground_truth) {
    const std::string entity = absl::StrCat("ground_truth:", id);
    if (scene.FindAgent(id) == nullptr) {
      out.push_back({entity, "ground truth for unknown agent"});
    }
    if (traj.agent_id != id) {
      out.push_back({entity, "ground truth agent_id does not match key"});
    }
    CheckTrajectory(traj, scene.dt, entity, &out);
  }
  return out;
}

}  // namespace semclique
