#ifndef SEMCLIQUE_KINEMATICS_H_
#define SEMCLIQUE_KINEMATICS_H_

#include <vector>

#include "absl/status/statusor.h"
#include "semclique/scene.h"

namespace semclique {

inline constexpr double kDefaultWeightCap = 1e3;

// Constant-velocity rollout: position advances by t * velocity, heading and
// velocity are kept. Rejects negative t.
absl::StatusOr<AgentState> PropagateCv(const AgentState& state, double t);

struct PropagationResult {
  // States at 0, dt, 2 dt, ..., floor(eta / dt) dt.
  std::vector<AgentState> states;
};

absl::StatusOr<PropagationResult> PropagateCvOverHorizon(
    const AgentState& state, double eta, double dt);

struct ClosestApproach {
  double distance = 0.0;
  double t_star = 0.0;
};

// Minimum over t in [0, eta] of |(p_j - p_i) + t (v_j - v_i)|, solved in
// closed form. Non-positive eta degenerates to the current distance.
ClosestApproach ClosestFutureDistance(const AgentState& si,
                                      const AgentState& sj, double eta);

// d0 / d when d < d0, 0 when d >= d0, saturating at `cap` (also returned for
// d == 0).
double DistanceWeight(double d, double d0, double cap = kDefaultWeightCap);

// True when the two agents come within `relevance_distance` of each other at
// some t in [0, eta] under constant velocity.
bool DirectionRelevant(const AgentState& so, const AgentState& si,
                       double relevance_distance, double eta);

}  // namespace semclique

#endif  // SEMCLIQUE_KINEMATICS_H_
