#include "semclique/kinematics.h"

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "test_util.h"

namespace semclique {
namespace {

using testing_util::State;

TEST(PropagateCvTest, LinearMotion) {
  absl::StatusOr<AgentState> s = PropagateCv(State(0, 0, 1, 0), 5.0);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->x, 5.0);
  EXPECT_EQ(s->y, 0.0);
}

TEST(PropagateCvTest, ZeroTimeIsIdentity) {
  const AgentState in = State(3, -2, 0.7, 1.1);
  EXPECT_EQ(*PropagateCv(in, 0.0), in);
}

TEST(PropagateCvTest, Arithmetic) {
  absl::StatusOr<AgentState> s = PropagateCv(State(2, -1, -0.5, 2), 4.0);
  ASSERT_TRUE(s.ok());
  EXPECT_DOUBLE_EQ(s->x, 0.0);
  EXPECT_DOUBLE_EQ(s->y, 7.0);
  EXPECT_EQ(s->vx, -0.5);
}

TEST(PropagateCvTest, NegativeTimeRejected) {
  EXPECT_EQ(PropagateCv(State(0, 0), -1.0).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PropagateCvOverHorizonTest, LengthAndExactPositions) {
  absl::StatusOr<PropagationResult> r =
      PropagateCvOverHorizon(State(1, 1, 2, -1), 4.0, 0.5);
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r->states.size(), 9u);
  for (size_t k = 0; k < r->states.size(); ++k) {
    EXPECT_DOUBLE_EQ(r->states[k].x, 1 + k * 0.5 * 2);
    EXPECT_DOUBLE_EQ(r->states[k].y, 1 - k * 0.5);
  }
  EXPECT_EQ(PropagateCvOverHorizon(State(0, 0), 1.1, 0.5)->states.size(), 3u);
}

TEST(ClosestFutureDistanceTest, HeadOnClosure) {
  const ClosestApproach c =
      ClosestFutureDistance(State(0, 0, 1, 0), State(10, 0, -1, 0), 10.0);
  EXPECT_DOUBLE_EQ(c.distance, 0.0);
  EXPECT_DOUBLE_EQ(c.t_star, 5.0);
}

TEST(ClosestFutureDistanceTest, ParallelSameVelocityKeepsGap) {
  const ClosestApproach c =
      ClosestFutureDistance(State(0, 0, 3, 1), State(0, 10, 3, 1), 6.0);
  EXPECT_DOUBLE_EQ(c.distance, 10.0);
  EXPECT_EQ(c.t_star, 0.0);
}

TEST(ClosestFutureDistanceTest, MatchesSamplingOracle) {
  const AgentState si = State(0, 0, 1, 0);
  const AgentState sj = State(10, 5, 0, 0);
  const ClosestApproach c = ClosestFutureDistance(si, sj, 20.0);
  const oracle::Approach want = oracle::SampledClosestApproach(
      si.position(), si.velocity(), sj.position(), sj.velocity(), 20.0,
      0.5 / 100.0);
  EXPECT_NEAR(c.distance, want.distance, 1e-9);
  EXPECT_NEAR(c.t_star, want.t, 1e-6);
  EXPECT_DOUBLE_EQ(c.distance, 5.0);
}

TEST(ClosestFutureDistanceTest, ClampsToHorizon) {
  // Closest approach would be at t = 5, outside a 2 s horizon.
  const ClosestApproach c =
      ClosestFutureDistance(State(0, 0, 1, 0), State(10, 0, -1, 0), 2.0);
  EXPECT_DOUBLE_EQ(c.distance, 6.0);
  EXPECT_DOUBLE_EQ(c.t_star, 2.0);
}

TEST(ClosestFutureDistanceTest, ExactlySymmetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < 500; ++k) {
    const AgentState a = State(u(rng), u(rng), u(rng) / 3, u(rng) / 3);
    const AgentState b = State(u(rng), u(rng), u(rng) / 3, u(rng) / 3);
    const ClosestApproach ab = ClosestFutureDistance(a, b, 4.0);
    const ClosestApproach ba = ClosestFutureDistance(b, a, 4.0);
    EXPECT_EQ(ab.distance, ba.distance);
    EXPECT_EQ(ab.t_star, ba.t_star);
  }
}

TEST(DistanceWeightTest, Examples) {
  EXPECT_EQ(DistanceWeight(40.0, 20.0), 0.0);
  EXPECT_EQ(DistanceWeight(20.0, 20.0), 0.0);
  EXPECT_DOUBLE_EQ(DistanceWeight(10.0, 20.0), 2.0);
  EXPECT_EQ(DistanceWeight(0.0, 20.0), kDefaultWeightCap);
  EXPECT_EQ(DistanceWeight(0.0, 20.0, 50.0), 50.0);
  // Saturates instead of jumping above the cap just outside d = 0.
  EXPECT_EQ(DistanceWeight(1e-6, 20.0), kDefaultWeightCap);
}

TEST(DirectionRelevantTest, Examples) {
  EXPECT_TRUE(
      DirectionRelevant(State(0, 0, 1, 0), State(10, 0, -1, 0), 1.0, 10.0));
  EXPECT_FALSE(
      DirectionRelevant(State(0, 0, 2, 0), State(10, 0, 2, 0), 5.0, 10.0));
}

TEST(DirectionRelevantTest, PerpendicularCrossingMatchesOracle) {
  const AgentState a = State(0, -8, 0, 1);
  const AgentState b = State(-8, 0, 1, 0);
  const oracle::Approach want = oracle::SampledClosestApproach(
      a.position(), a.velocity(), b.position(), b.velocity(), 10.0, 0.005);
  EXPECT_EQ(DirectionRelevant(a, b, 0.5, 10.0), want.distance < 0.5);
  EXPECT_TRUE(DirectionRelevant(a, b, 0.5, 10.0));
}

TEST(DirectionRelevantTest, MonotoneInRadiusAndConsistentWithDistance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int k = 0; k < 300; ++k) {
    const AgentState a = State(u(rng), u(rng), u(rng) / 2, u(rng) / 2);
    const AgentState b = State(u(rng), u(rng), u(rng) / 2, u(rng) / 2);
    const double d = ClosestFutureDistance(a, b, 4.0).distance;
    bool seen = false;
    for (double D = 0.5; D < 40.0; D += 0.5) {
      const bool r = DirectionRelevant(a, b, D, 4.0);
      EXPECT_EQ(r, d < D);
      EXPECT_EQ(r, DirectionRelevant(b, a, D, 4.0));
      if (seen) EXPECT_TRUE(r);
      seen = seen || r;
    }
  }
}

}  // namespace
}  // namespace semclique
