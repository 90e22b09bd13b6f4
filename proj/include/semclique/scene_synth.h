#ifndef SEMCLIQUE_SCENE_SYNTH_H_
#define SEMCLIQUE_SCENE_SYNTH_H_

// Seeded synthetic scenes. Every kind is deterministic per (kind, seed,
// params) and passes ValidateScene.
//
//   diverging      ego A with B closing head-on and C, D moving away
//   distance-ring  static ego, two agents converging from inside d0 and a
//                  static agent at 1.5 d0
//   divided-road   two lanes of opposing traffic split by a median barrier
//   lane-merge     a ramp merging into a main lane next to a parallel lane
//   crossing       one-way eastbound and northbound approaches meeting at an
//                  intersection with through and turn connectors
//   mixed          two-way road with a curb barrier and pedestrians on the
//                  sidewalk; the first vehicle stops halfway into the horizon
//   random         uniform agents over a lane grid with random barriers

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "semclique/scene.h"

namespace semclique {

enum class ScenarioKind {
  kDiverging,
  kDistanceRing,
  kDividedRoad,
  kLaneMerge,
  kCrossing,
  kMixed,
  kRandom,
};

std::string_view ScenarioKindName(ScenarioKind kind);
std::optional<ScenarioKind> ParseScenarioKind(std::string_view name);
const std::vector<ScenarioKind>& AllScenarioKinds();
// "diverging, distance-ring, ..." for diagnostics.
std::string ScenarioKindList();

struct ScenarioParams {
  // History states per agent beyond the current one.
  int history_steps = 4;
  double dt = 0.5;
  double horizon = 4.0;
  // crossing, mixed and random only; 0 picks the kind's default.
  int agent_count = 0;
  // Position noise for the hand-laid kinds, meters. Must stay below 0.5 for
  // their expected partitions to hold.
  double jitter = 0.5;
};

absl::StatusOr<Scene> GenScenario(ScenarioKind kind, uint64_t seed,
                                  const ScenarioParams& params = {});
absl::StatusOr<Scene> GenScenario(std::string_view kind, uint64_t seed,
                                  const ScenarioParams& params = {});

}  // namespace semclique

#endif  // SEMCLIQUE_SCENE_SYNTH_H_
