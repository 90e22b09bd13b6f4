#ifndef SEMCLIQUE_SCENE_H_
#define SEMCLIQUE_SCENE_H_

// Domain types shared across the pipeline: agents and their histories, the
// semantic map, interaction graphs, cliques and agent-centric local maps.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semclique/geometry.h"

namespace semclique {

enum class AgentKind { kVehicle, kPedestrian };

std::string_view AgentKindName(AgentKind kind);
std::optional<AgentKind> ParseAgentKind(std::string_view name);

struct AgentType {
  AgentKind kind = AgentKind::kVehicle;
  // Circle used for collision checks and raster footprints, meters.
  double footprint_radius = 2.0;
  // Interaction threshold distance, meters.
  double d0 = 20.0;

  // 20 m / 2.0 m for vehicles, 10 m / 0.5 m for pedestrians.
  static AgentType Default(AgentKind kind);

  friend bool operator==(const AgentType&, const AgentType&) = default;
};

// Vehicle projection (x, y, speed, heading).
struct VehicleView {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double heading = 0.0;
};

// Pedestrian projection (x, y, vx, vy); heading is ignored.
struct PedestrianView {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]
  double vx = 0.0;
  double vy = 0.0;

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return {vx, vy}; }
  double speed() const { return std::hypot(vx, vy); }
  VehicleView vehicle_view() const { return {x, y, speed(), heading}; }
  PedestrianView pedestrian_view() const { return {x, y, vx, vy}; }

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

// Maps any finite angle into (-pi, pi].
double NormalizeAngle(double angle);

struct TimedState {
  int index = 0;
  AgentState state;

  friend bool operator==(const TimedState&, const TimedState&) = default;
};

struct TrajectoryHistory {
  std::string agent_id;
  double dt = 0.0;
  // Strictly increasing, consecutive timestep indices.
  std::vector<TimedState> states;

  const AgentState* StateAt(int index) const;
  int first_index() const { return states.front().index; }
  int last_index() const { return states.back().index; }

  friend bool operator==(const TrajectoryHistory&,
                         const TrajectoryHistory&) = default;
};

enum class PolylineKind { kBarrier, kLaneDivider };

std::string_view PolylineKindName(PolylineKind kind);
std::optional<PolylineKind> ParsePolylineKind(std::string_view name);

// A barrier or a directed lane divider, defined by its ordered tokens.
struct TokenPolyline {
  std::string id;
  PolylineKind kind = PolylineKind::kBarrier;
  std::vector<Vec2> points;

  size_t segment_count() const {
    return points.size() < 2 ? 0 : points.size() - 1;
  }
  Segment segment(size_t i) const { return {points[i], points[i + 1]}; }
  double Length() const;

  friend bool operator==(const TokenPolyline&, const TokenPolyline&) = default;
};

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct SemanticMap {
  std::vector<TokenPolyline> polylines;
  // Divider id -> dividers whose first token is this divider's last token.
  std::map<std::string, std::vector<std::string>> divider_successors;
  Bounds bounds;

  const TokenPolyline* Find(std::string_view id) const;

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;
};

// Successor relation derived from shared end tokens: b follows a when a's
// last point equals b's first point. Only lane dividers participate.
std::map<std::string, std::vector<std::string>> SuccessorsFromSharedTokens(
    const std::vector<TokenPolyline>& polylines);

// Smallest rectangle containing every polyline point, padded by `margin`.
Bounds ComputeBounds(const std::vector<TokenPolyline>& polylines,
                     double margin);

struct SceneAgent {
  std::string id;
  AgentType type;
  TrajectoryHistory history;

  friend bool operator==(const SceneAgent&, const SceneAgent&) = default;
};

struct Scene {
  int schema_version = 1;
  std::vector<SceneAgent> agents;
  SemanticMap map;
  double dt = 0.5;
  // Prediction (and pruning) horizon, seconds.
  double horizon = 4.0;
  // Future states keyed by agent id; used only for evaluation.
  std::map<std::string, TrajectoryHistory> ground_truth;

  const SceneAgent* FindAgent(std::string_view id) const;
  // Sorted union of every history timestep index.
  std::vector<int> TimestepIndices() const;
  // Number of future steps in the horizon, floor(horizon / dt).
  int HorizonSteps() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

// Symmetric, zero-diagonal, nonnegative interaction weights over the agents
// active at one timestep. Agents are indexed in ascending id order.
class SceneGraph {
 public:
  SceneGraph(int timestep_index, std::vector<std::string> agent_ids);

  int timestep_index() const { return timestep_index_; }
  const std::vector<std::string>& agent_ids() const { return agent_ids_; }
  size_t size() const { return agent_ids_.size(); }

  double alpha(size_t i, size_t j) const { return alpha_[i * size() + j]; }
  // Writes both (i, j) and (j, i). Requires i != j and a finite w >= 0.
  void SetAlpha(size_t i, size_t j, double w);

  std::optional<size_t> IndexOf(std::string_view id) const;
  // Number of unordered pairs with alpha strictly above `threshold`.
  size_t EdgeCount(double threshold) const;

 private:
  int timestep_index_;
  std::vector<std::string> agent_ids_;
  std::vector<double> alpha_;
};

struct Clique {
  int timestep_index = 0;
  // Sorted ascending.
  std::vector<std::string> member_ids;

  friend bool operator==(const Clique&, const Clique&) = default;
};

// Agent-centric occupancy raster, K x K cells by L channels.
struct LocalMap {
  std::string agent_id;
  int size = 0;
  int channels = 0;
  double resolution = 0.0;
  // Index (ix * size + iy) * channels + channel; ix runs along the agent
  // heading, iy to its left.
  std::vector<uint8_t> cells;

  uint8_t at(int ix, int iy, int channel) const {
    return cells[(static_cast<size_t>(ix) * size + iy) * channels + channel];
  }
  size_t CountSet(int channel) const;

  friend bool operator==(const LocalMap&, const LocalMap&) = default;
};

struct Violation {
  std::string entity;
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Checks every structural invariant of the scene. Empty means valid.
std::vector<Violation> ValidateScene(const Scene& scene);

}  // namespace semclique

#endif  // SEMCLIQUE_SCENE_H_
