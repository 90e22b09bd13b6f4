#include "semclique/kinematics.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace semclique {

absl::StatusOr<AgentState> PropagateCv(const AgentState& state, double t) {
  if (!(t >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("propagation time must be >= 0, got ", t));
  }
  AgentState out = state;
  out.x = state.x + t * state.vx;
  out.y = state.y + t * state.vy;
  return out;
}

absl::StatusOr<PropagationResult> PropagateCvOverHorizon(
    const AgentState& state, double eta, double dt) {
  if (!(dt > 0.0) || !(eta >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("need dt > 0 and eta >= 0, got dt=", dt, " eta=", eta));
  }
  const int steps = static_cast<int>(std::floor(eta / dt + 1e-9));
  PropagationResult result;
  result.states.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    result.states.push_back(*PropagateCv(state, k * dt));
  }
  return result;
}

ClosestApproach ClosestFutureDistance(const AgentState& si,
                                      const AgentState& sj, double eta) {
  const Vec2 dp = sj.position() - si.position();
  const Vec2 dv = sj.velocity() - si.velocity();
  const double dv2 = dv.SquaredNorm();
  const double horizon = std::max(eta, 0.0);
  double t = 0.0;
  if (dv2 > 0.0) {
    t = std::clamp(-Dot(dp, dv) / dv2, 0.0, horizon);
  }
  return {(dp + t * dv).Norm(), t};
}

double DistanceWeight(double d, double d0, double cap) {
  if (d >= d0) return 0.0;
  if (d <= 0.0) return cap;
  return std::min(d0 / d, cap);
}

bool DirectionRelevant(const AgentState& so, const AgentState& si,
                       double relevance_distance, double eta) {
  return ClosestFutureDistance(so, si, eta).distance < relevance_distance;
}

}  // namespace semclique
