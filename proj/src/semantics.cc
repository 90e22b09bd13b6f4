#include "semclique/semantics.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"

namespace semclique {
namespace {

// Assumes a, b, c collinear: is c within the bounding box of a-b?
bool WithinBox(Vec2 a, Vec2 b, Vec2 c) {
  return c.x >= std::min(a.x, b.x) && c.x <= std::max(a.x, b.x) &&
         c.y >= std::min(a.y, b.y) && c.y <= std::max(a.y, b.y);
}

}  // namespace

Orientation Orient(Vec2 a, Vec2 b, Vec2 c) {
  const double cross = Cross(b - a, c - a);
  if (std::abs(cross) <= kOrientationEpsilon) return Orientation::kCollinear;
  return cross > 0.0 ? Orientation::kCounterclockwise
                     : Orientation::kClockwise;
}

bool SegmentsIntersect(const Segment& s1, const Segment& s2) {
  const Vec2 a = s1.start, b = s1.end, c = s2.start, d = s2.end;
  const Orientation o1 = Orient(a, b, c);
  const Orientation o2 = Orient(a, b, d);
  const Orientation o3 = Orient(c, d, a);
  const Orientation o4 = Orient(c, d, b);

  if (o1 != o2 && o3 != o4) return true;

  if (o1 == Orientation::kCollinear && WithinBox(a, b, c)) return true;
  if (o2 == Orientation::kCollinear && WithinBox(a, b, d)) return true;
  if (o3 == Orientation::kCollinear && WithinBox(c, d, a)) return true;
  if (o4 == Orientation::kCollinear && WithinBox(c, d, b)) return true;
  return false;
}

bool BarrierBetween(Vec2 pi, Vec2 pj, const SemanticMap& map) {
  const Segment link{pi, pj};
  for (const TokenPolyline& poly : map.polylines) {
    if (poly.kind != PolylineKind::kBarrier) continue;
    for (size_t k = 0; k < poly.segment_count(); ++k) {
      if (SegmentsIntersect(link, poly.segment(k))) return true;
    }
  }
  return false;
}

std::optional<std::string> AssociateLane(const AgentState& state,
                                         const SemanticMap& map,
                                         double radius) {
  const Vec2 p = state.position();
  const Vec2 heading = UnitFromAngle(state.heading);

  std::map<std::string, double> candidates;  // sorted by id
  for (const TokenPolyline& poly : map.polylines) {
    if (poly.kind != PolylineKind::kLaneDivider) continue;
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < poly.segment_count(); ++k) {
      const Segment seg = poly.segment(k);
      if (Dot(seg.end - seg.start, heading) <= 0.0) continue;
      best = std::min(best, PointSegmentDistance(p, seg));
    }
    if (best <= radius) candidates.emplace(poly.id, best);
  }

  std::optional<std::string> chosen;
  double chosen_distance = std::numeric_limits<double>::infinity();
  for (const auto& [id, distance] : candidates) {
    if (distance < chosen_distance - 1e-9) {
      chosen = id;
      chosen_distance = distance;
    }
  }
  return chosen;
}

absl::StatusOr<LaneSet> ReachableLanes(std::string_view divider_id,
                                       const SemanticMap& map, int depth) {
  const TokenPolyline* seed = map.Find(divider_id);
  if (seed == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("unknown lane divider '", std::string(divider_id), "'"));
  }
  if (seed->kind != PolylineKind::kLaneDivider) {
    return absl::InvalidArgumentError(
        absl::StrCat("polyline '", std::string(divider_id), "' is not a lane divider"));
  }
  if (depth < 0) {
    return absl::InvalidArgumentError("reachability depth must be >= 0");
  }

  LaneSet result;
  result.divider_ids.insert(seed->id);
  std::deque<std::pair<std::string, int>> frontier{{seed->id, 0}};
  while (!frontier.empty()) {
    auto [id, hops] = std::move(frontier.front());
    frontier.pop_front();
    if (hops == depth) continue;
    auto it = map.divider_successors.find(id);
    if (it == map.divider_successors.end()) continue;
    for (const std::string& next : it->second) {
      if (result.divider_ids.insert(next).second) {
        frontier.emplace_back(next, hops + 1);
      }
    }
  }
  return result;
}

bool LanesOverlap(const LaneSet& a, const LaneSet& b) {
  auto ia = a.divider_ids.begin();
  auto ib = b.divider_ids.begin();
  while (ia != a.divider_ids.end() && ib != b.divider_ids.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return false;
}

absl::StatusOr<LocalMap> RasterizeLocalMap(const AgentState& state,
                                           const SemanticMap& map, int size,
                                           double resolution,
                                           std::span<const Footprint> others) {
  if (size <= 0 || !(resolution > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("raster needs size > 0 and resolution > 0, got ", size,
                     " and ", resolution));
  }
  LocalMap raster;
  raster.size = size;
  raster.channels = kLocalMapChannels;
  raster.resolution = resolution;
  raster.cells.assign(static_cast<size_t>(size) * size * kLocalMapChannels, 0);

  const Vec2 origin = state.position();
  const double half_extent = 0.5 * (size - 1) * resolution;
  const double half_cell = 0.5 * resolution;
  // Anything farther than this from the agent cannot touch a cell center.
  const double reach = std::sqrt(2.0) * half_extent + half_cell;

  std::vector<Vec2> centers;
  centers.reserve(static_cast<size_t>(size) * size);
  for (int ix = 0; ix < size; ++ix) {
    for (int iy = 0; iy < size; ++iy) {
      const Vec2 local{ix * resolution - half_extent,
                       iy * resolution - half_extent};
      centers.push_back(origin + Rotate(local, state.heading));
    }
  }

  auto mark = [&](size_t cell, int channel) {
    raster.cells[cell * kLocalMapChannels + channel] = 1;
  };

  for (const TokenPolyline& poly : map.polylines) {
    const int channel = poly.kind == PolylineKind::kBarrier
                            ? kBarrierChannel
                            : kLaneDividerChannel;
    for (size_t k = 0; k < poly.segment_count(); ++k) {
      const Segment seg = poly.segment(k);
      if (PointSegmentDistance(origin, seg) > reach) continue;
      for (size_t cell = 0; cell < centers.size(); ++cell) {
        if (PointSegmentDistance(centers[cell], seg) <= half_cell) {
          mark(cell, channel);
        }
      }
    }
  }

  for (const Footprint& fp : others) {
    if (Distance(origin, fp.center) > reach + fp.radius) continue;
    const int channel = fp.kind == AgentKind::kVehicle ? kVehicleChannel
                                                       : kPedestrianChannel;
    for (size_t cell = 0; cell < centers.size(); ++cell) {
      if (Distance(centers[cell], fp.center) <= fp.radius) mark(cell, channel);
    }
  }
  return raster;
}

}  // namespace semclique
