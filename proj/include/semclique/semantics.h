#ifndef SEMCLIQUE_SEMANTICS_H_
#define SEMCLIQUE_SEMANTICS_H_

// Map-geometry predicates over a SemanticMap: barrier crossing, lane
// association and reachability, and agent-centric rasterization.

#include <optional>
#include <set>
#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "semclique/geometry.h"
#include "semclique/scene.h"

namespace semclique {

enum class Orientation { kClockwise, kCounterclockwise, kCollinear };

inline constexpr double kOrientationEpsilon = 1e-9;

// Sign of cross(b - a, c - a); |cross| <= 1e-9 m^2 counts as collinear.
Orientation Orient(Vec2 a, Vec2 b, Vec2 c);

// True iff the closed segments share at least one point. Collinear overlap
// counts.
bool SegmentsIntersect(const Segment& s1, const Segment& s2);

// True iff the segment between the two points touches any barrier segment.
bool BarrierBetween(Vec2 pi, Vec2 pj, const SemanticMap& map);

inline constexpr double kDefaultAssociationRadius = 5.0;
inline constexpr int kDefaultReachabilityDepth = 3;

// Nearest lane divider within `radius` whose local segment direction is less
// than 90 degrees from the agent heading. Ties within 1e-9 m go to the
// lexicographically smaller id.
std::optional<std::string> AssociateLane(
    const AgentState& state, const SemanticMap& map,
    double radius = kDefaultAssociationRadius);

struct LaneSet {
  std::set<std::string> divider_ids;

  friend bool operator==(const LaneSet&, const LaneSet&) = default;
};

// Seed plus every divider reachable through at most `depth` successor hops.
absl::StatusOr<LaneSet> ReachableLanes(std::string_view divider_id,
                                       const SemanticMap& map, int depth);

bool LanesOverlap(const LaneSet& a, const LaneSet& b);

// Raster channel layout.
inline constexpr int kBarrierChannel = 0;
inline constexpr int kLaneDividerChannel = 1;
inline constexpr int kVehicleChannel = 2;
inline constexpr int kPedestrianChannel = 3;
inline constexpr int kLocalMapChannels = 4;

struct Footprint {
  Vec2 center;
  double radius = 0.0;
  AgentKind kind = AgentKind::kVehicle;
};

// K x K crop centered on the agent with its heading along +ix. A polyline
// channel is set where the cell center lies within half a cell of a polyline
// segment; a footprint channel where it lies inside another agent's circle.
absl::StatusOr<LocalMap> RasterizeLocalMap(
    const AgentState& state, const SemanticMap& map, int size,
    double resolution, std::span<const Footprint> others = {});

}  // namespace semclique

#endif  // SEMCLIQUE_SEMANTICS_H_
