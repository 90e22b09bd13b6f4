#include "semclique/semantics.h"

#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "test_util.h"

namespace semclique {
namespace {

using testing_util::Polyline;
using testing_util::State;
using testing_util::StateWithHeading;

constexpr double kPi = std::numbers::pi;

TEST(OrientTest, CanonicalCases) {
  EXPECT_EQ(Orient({0, 0}, {1, 0}, {0, 1}), Orientation::kCounterclockwise);
  EXPECT_EQ(Orient({0, 0}, {1, 0}, {2, 0}), Orientation::kCollinear);
  EXPECT_EQ(Orient({0, 0}, {0, 1}, {1, 0}), Orientation::kClockwise);
  // Vertical segments are where a slope comparison breaks down.
  EXPECT_EQ(Orient({0, 0}, {0, 1}, {0, 5}), Orientation::kCollinear);
  EXPECT_EQ(Orient({0, 0}, {1, 0}, {0.5, 1e-12}), Orientation::kCollinear);
}

TEST(OrientTest, AntisymmetricInLastTwoPoints) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const Orientation o = Orient(a, b, c);
    const Orientation r = Orient(a, c, b);
    if (o == Orientation::kCollinear) {
      EXPECT_EQ(r, Orientation::kCollinear);
    } else {
      EXPECT_NE(r, o);
      EXPECT_NE(r, Orientation::kCollinear);
    }
  }
}

TEST(SegmentsIntersectTest, Examples) {
  EXPECT_TRUE(SegmentsIntersect({{0, -1}, {0, 1}}, {{-1, 0}, {1, 0}}));
  EXPECT_FALSE(SegmentsIntersect({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}));
}

TEST(SegmentsIntersectTest, TouchingAndCollinearCases) {
  // Shared endpoint.
  EXPECT_TRUE(SegmentsIntersect({{0, 0}, {1, 1}}, {{1, 1}, {2, 0}}));
  // T junction.
  EXPECT_TRUE(SegmentsIntersect({{0, 0}, {2, 0}}, {{1, 0}, {1, 3}}));
  // Collinear overlap.
  EXPECT_TRUE(SegmentsIntersect({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}));
  // Collinear, disjoint.
  EXPECT_FALSE(SegmentsIntersect({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}));
  // Collinear, touching at one end.
  EXPECT_TRUE(SegmentsIntersect({{0, 0}, {1, 0}}, {{1, 0}, {3, 0}}));
}

TEST(SegmentsIntersectTest, MatchesParametricOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> g(0, 3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    auto pt = [&] {
      return k % 2 ? Vec2{double(g(rng)), double(g(rng))}
                   : Vec2{u(rng), u(rng)};
    };
    Segment a{pt(), pt()}, b{pt(), pt()};
    if (a.start == a.end || b.start == b.end) continue;
    EXPECT_EQ(SegmentsIntersect(a, b),
              oracle::ParametricIntersect(a.start, a.end, b.start, b.end));
  }
}

SemanticMap MapWith(std::vector<TokenPolyline> polylines) {
  SemanticMap map;
  map.polylines = std::move(polylines);
  map.divider_successors = SuccessorsFromSharedTokens(map.polylines);
  return map;
}

TEST(BarrierBetweenTest, Examples) {
  const SemanticMap wall =
      MapWith({Polyline("b", PolylineKind::kBarrier, {{0, -10}, {0, 10}})});
  EXPECT_TRUE(BarrierBetween({-5, 0}, {5, 0}, wall));
  EXPECT_TRUE(BarrierBetween({5, 0}, {-5, 0}, wall));
  const SemanticMap far =
      MapWith({Polyline("b", PolylineKind::kBarrier, {{100, -10}, {100, 10}})});
  EXPECT_FALSE(BarrierBetween({-5, 0}, {5, 0}, far));
}

TEST(BarrierBetweenTest, LaneDividersDoNotBlock) {
  const SemanticMap lanes = MapWith(
      {Polyline("d", PolylineKind::kLaneDivider, {{0, -10}, {0, 10}})});
  EXPECT_FALSE(BarrierBetween({-5, 0}, {5, 0}, lanes));
}

TEST(BarrierBetweenTest, EndpointTangentMatchesPerSegmentOracle) {
  const SemanticMap map = MapWith({Polyline(
      "b", PolylineKind::kBarrier, {{0, 0}, {0, 4}, {3, 4}})});
  const std::vector<std::pair<Vec2, Vec2>> cases = {
      {{-2, 0}, {2, 0}},    // grazes the first token
      {{-2, -1}, {2, -1}},  // passes just below it
      {{3, 2}, {3, 6}},     // touches the last token
      {{-1, 5}, {1, 3}},    // crosses the corner token
  };
  for (const auto& [p, q] : cases) {
    bool want = false;
    const TokenPolyline& b = map.polylines[0];
    for (size_t k = 0; k < b.segment_count(); ++k) {
      want = want || oracle::ParametricIntersect(p, q, b.points[k],
                                                 b.points[k + 1]);
    }
    EXPECT_EQ(BarrierBetween(p, q, map), want);
  }
}

TEST(AssociateLaneTest, OnCenterlineAndHeadingGate) {
  const SemanticMap map = MapWith(
      {Polyline("d", PolylineKind::kLaneDivider, {{-50, 0}, {50, 0}})});
  EXPECT_EQ(AssociateLane(State(3, 0, 5, 0), map), "d");
  EXPECT_EQ(AssociateLane(State(3, 0, -5, 0), map), std::nullopt);
  EXPECT_EQ(AssociateLane(State(3, 6, 5, 0), map), std::nullopt);
  EXPECT_EQ(AssociateLane(State(3, 6, 5, 0), map, 7.0), "d");
}

TEST(AssociateLaneTest, EquidistantTieGoesToSmallerId) {
  const SemanticMap map = MapWith(
      {Polyline("lane_b", PolylineKind::kLaneDivider, {{-50, 2}, {50, 2}}),
       Polyline("lane_a", PolylineKind::kLaneDivider, {{-50, -2}, {50, -2}})});
  EXPECT_EQ(AssociateLane(State(0, 0, 4, 0), map), "lane_a");
  EXPECT_EQ(AssociateLane(State(0, 0.5, 4, 0), map), "lane_b");
}

TEST(AssociateLaneTest, UsesLocalSegmentTangent) {
  // An L-shaped divider: the agent heading north near the vertical leg.
  const SemanticMap map = MapWith({Polyline(
      "d", PolylineKind::kLaneDivider, {{0, 0}, {20, 0}, {20, 20}})});
  EXPECT_EQ(AssociateLane(State(21, 10, 0, 3), map), "d");
  EXPECT_EQ(AssociateLane(State(21, 10, 0, -3), map), std::nullopt);
}

SemanticMap ChainMap() {
  return MapWith(
      {Polyline("d1", PolylineKind::kLaneDivider, {{0, 0}, {10, 0}}),
       Polyline("d2", PolylineKind::kLaneDivider, {{10, 0}, {20, 0}}),
       Polyline("d3", PolylineKind::kLaneDivider, {{20, 0}, {30, 0}}),
       Polyline("iso", PolylineKind::kLaneDivider, {{0, 50}, {10, 50}}),
       Polyline("b", PolylineKind::kBarrier, {{0, -5}, {10, -5}})});
}

TEST(ReachableLanesTest, Examples) {
  const SemanticMap map = ChainMap();
  EXPECT_EQ(ReachableLanes("iso", map, 5)->divider_ids,
            (std::set<std::string>{"iso"}));
  EXPECT_EQ(ReachableLanes("d1", map, 1)->divider_ids,
            (std::set<std::string>{"d1", "d2"}));
  EXPECT_EQ(ReachableLanes("d1", map, 0)->divider_ids,
            (std::set<std::string>{"d1"}));
}

TEST(ReachableLanesTest, Errors) {
  const SemanticMap map = ChainMap();
  EXPECT_EQ(ReachableLanes("nope", map, 1).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(ReachableLanes("b", map, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ReachableLanes("d1", map, -1).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ReachableLanesTest, BranchingGraphMatchesPathEnumeration) {
  SemanticMap map;
  for (const char* id : {"s", "a", "b", "c", "d", "e", "f"}) {
    map.polylines.push_back(
        Polyline(id, PolylineKind::kLaneDivider, {{0, 0}, {1, 0}}));
  }
  map.divider_successors = {{"s", {"a", "b"}}, {"a", {"c"}},
                            {"b", {"c", "d"}}, {"c", {"e"}},
                            {"d", {"s"}},      {"e", {"f"}}};
  for (int depth = 0; depth <= 5; ++depth) {
    const std::set<std::string> want =
        oracle::PathEnumeratedLanes(map.divider_successors, "s", depth);
    EXPECT_EQ(ReachableLanes("s", map, depth)->divider_ids, want);
  }
  // Monotone in depth.
  for (int depth = 0; depth < 5; ++depth) {
    const auto lo = ReachableLanes("s", map, depth)->divider_ids;
    const auto hi = ReachableLanes("s", map, depth + 1)->divider_ids;
    EXPECT_TRUE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
  }
}

TEST(LanesOverlapTest, Examples) {
  EXPECT_TRUE(LanesOverlap({{"d1", "d3"}}, {{"d2", "d3"}}));
  EXPECT_FALSE(LanesOverlap({{"d1"}}, {{"d2"}}));
  EXPECT_FALSE(LanesOverlap({}, {{"d1"}}));
  EXPECT_TRUE(LanesOverlap({{"d2", "d3"}}, {{"d1", "d3"}}));
}

TEST(RasterizeTest, EmptyMapIsAllZero) {
  absl::StatusOr<LocalMap> m = RasterizeLocalMap(State(0, 0, 1, 0), {}, 16, 0.5);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->size, 16);
  EXPECT_EQ(m->channels, kLocalMapChannels);
  for (int ch = 0; ch < kLocalMapChannels; ++ch) EXPECT_EQ(m->CountSet(ch), 0u);
}

TEST(RasterizeTest, RejectsBadGrid) {
  EXPECT_FALSE(RasterizeLocalMap(State(0, 0), {}, 0, 0.5).ok());
  EXPECT_FALSE(RasterizeLocalMap(State(0, 0), {}, 8, 0.0).ok());
}

Vec2 RotatePoint(Vec2 p, double angle) {
  return {p.x * std::cos(angle) - p.y * std::sin(angle),
          p.x * std::sin(angle) + p.y * std::cos(angle)};
}

TEST(RasterizeTest, RotationEquivariantAtQuarterTurns) {
  // Offsets stay clear of half-cell boundaries so that rounding in the
  // rotation cannot flip a cell.
  const std::vector<Vec2> barrier = {{-20, 3.13}, {20, 3.13}};
  const std::vector<Vec2> lane = {{-20, -1.37}, {4.07, -1.37}, {9.07, 5.03}};
  const Footprint other{{6.11, -4.06}, 1.63, AgentKind::kPedestrian};
  const AgentState base = StateWithHeading(1.02, 0.51, 0.0, 4, 0);
  absl::StatusOr<LocalMap> ref = RasterizeLocalMap(
      base,
      MapWith({Polyline("b", PolylineKind::kBarrier, barrier),
               Polyline("d", PolylineKind::kLaneDivider, lane)}),
      24, 0.5, std::vector<Footprint>{other});
  ASSERT_TRUE(ref.ok());
  EXPECT_GT(ref->CountSet(kBarrierChannel), 0u);
  EXPECT_GT(ref->CountSet(kLaneDividerChannel), 0u);
  EXPECT_GT(ref->CountSet(kPedestrianChannel), 0u);
  for (int q = 1; q < 4; ++q) {
    const double angle = q * kPi / 2;
    auto rot = [&](const std::vector<Vec2>& pts) {
      std::vector<Vec2> out;
      for (Vec2 p : pts) out.push_back(RotatePoint(p, angle));
      return out;
    };
    const Vec2 pos = RotatePoint(base.position(), angle);
    const AgentState s = StateWithHeading(pos.x, pos.y, NormalizeAngle(angle));
    Footprint moved = other;
    moved.center = RotatePoint(other.center, angle);
    absl::StatusOr<LocalMap> got = RasterizeLocalMap(
        s,
        MapWith({Polyline("b", PolylineKind::kBarrier, rot(barrier)),
                 Polyline("d", PolylineKind::kLaneDivider, rot(lane))}),
        24, 0.5, std::vector<Footprint>{moved});
    ASSERT_TRUE(got.ok());
    EXPECT_EQ(got->cells, ref->cells) << "quarter turns: " << q;
  }
}

TEST(RasterizeTest, DiagonalBarrierMatchesPerCellOracle) {
  const std::vector<Vec2> pts = {{-30, -25}, {25, 28}};
  const SemanticMap map =
      MapWith({Polyline("b", PolylineKind::kBarrier, pts)});
  for (double heading : {0.0, 0.4, -2.2}) {
    const AgentState s = StateWithHeading(2.3, -1.1, heading);
    const int size = 32;
    const double res = 0.75;
    absl::StatusOr<LocalMap> m = RasterizeLocalMap(s, map, size, res);
    ASSERT_TRUE(m.ok());
    size_t marked = 0;
    for (int ix = 0; ix < size; ++ix) {
      for (int iy = 0; iy < size; ++iy) {
        const Vec2 c = oracle::CellCenter(s, size, res, ix, iy);
        const bool want =
            oracle::PointToSegment(c.x, c.y, pts[0], pts[1]) <= res / 2 + 1e-9;
        // Cells exactly on the half-cell boundary are quantization noise.
        const double margin =
            std::abs(oracle::PointToSegment(c.x, c.y, pts[0], pts[1]) - res / 2);
        if (margin > 1e-9) {
          EXPECT_EQ(m->at(ix, iy, kBarrierChannel), want ? 1 : 0)
              << ix << "," << iy;
        }
        marked += want;
      }
    }
    EXPECT_GT(marked, 0u);
    EXPECT_EQ(m->CountSet(kLaneDividerChannel), 0u);
  }
}

TEST(RasterizeTest, HeadingAlongPlusX) {
  // A barrier directly ahead shows up at large ix, whatever the heading.
  const SemanticMap map = MapWith(
      {Polyline("b", PolylineKind::kBarrier, {{-1, 6}, {1, 6}})});
  absl::StatusOr<LocalMap> m =
      RasterizeLocalMap(StateWithHeading(0, 0, kPi / 2), map, 16, 1.0);
  ASSERT_TRUE(m.ok());
  bool ahead = false;
  for (int iy = 0; iy < 16; ++iy) ahead = ahead || m->at(13, iy, 0);
  EXPECT_TRUE(ahead);
  for (int ix = 0; ix < 8; ++ix) {
    for (int iy = 0; iy < 16; ++iy) EXPECT_EQ(m->at(ix, iy, 0), 0);
  }
}

}  // namespace
}  // namespace semclique
