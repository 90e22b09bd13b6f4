#include "semclique/scene_synth.h"

#include <gtest/gtest.h>

#include "semclique/clique_engine.h"
#include "semclique/scene_io.h"
#include "semclique/semantics.h"

namespace semclique {
namespace {

using Partition = std::vector<std::vector<std::string>>;

Partition FinalPartition(const Scene& scene, const CriteriaConfig& config) {
  absl::StatusOr<CliqueTimeline> t = CliquesOverTime(scene, config);
  EXPECT_TRUE(t.ok()) << t.status();
  Partition out;
  if (!t.ok()) return out;
  for (const Clique& c : t->final_cliques) out.push_back(c.member_ids);
  std::sort(out.begin(), out.end());
  return out;
}

CriteriaConfig Without(bool CriteriaConfig::*flag) {
  CriteriaConfig c;
  c.*flag = false;
  return c;
}

TEST(ScenarioKindTest, NamesRoundTrip) {
  for (ScenarioKind kind : AllScenarioKinds()) {
    EXPECT_EQ(ParseScenarioKind(ScenarioKindName(kind)), kind);
  }
  EXPECT_FALSE(ParseScenarioKind("roundabout").has_value());
  EXPECT_NE(ScenarioKindList().find("divided-road"), std::string::npos);
}

TEST(GenScenarioTest, EveryKindIsValidAndDeterministic) {
  for (ScenarioKind kind : AllScenarioKinds()) {
    for (uint64_t seed : {1u, 2u, 77u}) {
      absl::StatusOr<Scene> a = GenScenario(kind, seed);
      absl::StatusOr<Scene> b = GenScenario(kind, seed);
      ASSERT_TRUE(a.ok()) << ScenarioKindName(kind) << ": " << a.status();
      EXPECT_TRUE(ValidateScene(*a).empty()) << ScenarioKindName(kind);
      EXPECT_EQ(SerializeScene(*a), SerializeScene(*b));
      for (const SceneAgent& agent : a->agents) {
        EXPECT_TRUE(a->ground_truth.contains(agent.id));
        EXPECT_EQ(agent.history.states.size(), 5u);
      }
    }
  }
}

TEST(GenScenarioTest, SeedsDiffer) {
  EXPECT_NE(SerializeScene(*GenScenario(ScenarioKind::kRandom, 1)),
            SerializeScene(*GenScenario(ScenarioKind::kRandom, 2)));
}

TEST(GenScenarioTest, ParamsApply) {
  ScenarioParams params;
  params.history_steps = 2;
  params.dt = 0.25;
  params.horizon = 2.0;
  params.agent_count = 9;
  absl::StatusOr<Scene> s = GenScenario(ScenarioKind::kCrossing, 5, params);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->agents.size(), 9u);
  EXPECT_EQ(s->dt, 0.25);
  EXPECT_EQ(s->HorizonSteps(), 8);
  EXPECT_EQ(s->agents[0].history.states.size(), 3u);
}

TEST(GenScenarioTest, BadInputsRejected) {
  EXPECT_EQ(GenScenario("roundabout", 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  ScenarioParams params;
  params.jitter = 0.7;
  EXPECT_FALSE(GenScenario(ScenarioKind::kDiverging, 1, params).ok());
  params = ScenarioParams{};
  params.horizon = 0.1;
  EXPECT_FALSE(GenScenario(ScenarioKind::kDiverging, 1, params).ok());
  params = ScenarioParams{};
  params.history_steps = -1;
  EXPECT_FALSE(GenScenario(ScenarioKind::kDiverging, 1, params).ok());
}

class GoldenPartitionTest : public ::testing::TestWithParam<uint64_t> {};

TEST_P(GoldenPartitionTest, Diverging) {
  const Scene s = *GenScenario(ScenarioKind::kDiverging, GetParam());
  EXPECT_EQ(FinalPartition(s, CriteriaConfig{}),
            (Partition{{"A", "B"}, {"C"}, {"D"}}));
  EXPECT_EQ(FinalPartition(s, CriteriaConfig::DistanceOnly()),
            (Partition{{"A", "B", "C", "D"}}));
  EXPECT_EQ(FinalPartition(s, Without(&CriteriaConfig::use_direction)),
            (Partition{{"A", "B", "C", "D"}}));
}

TEST_P(GoldenPartitionTest, DistanceRing) {
  const Scene s = *GenScenario(ScenarioKind::kDistanceRing, GetParam());
  const Partition want = {{"A", "B", "C"}, {"E"}};
  EXPECT_EQ(FinalPartition(s, CriteriaConfig{}), want);
  EXPECT_EQ(FinalPartition(s, CriteriaConfig::DistanceOnly()), want);
}

TEST_P(GoldenPartitionTest, DividedRoad) {
  const Scene s = *GenScenario(ScenarioKind::kDividedRoad, GetParam());
  EXPECT_EQ(FinalPartition(s, CriteriaConfig{}),
            (Partition{{"A", "C"}, {"B", "D"}}));
  EXPECT_EQ(FinalPartition(s, Without(&CriteriaConfig::use_barrier)),
            (Partition{{"A", "B", "C", "D"}}));
  EXPECT_EQ(FinalPartition(s, CriteriaConfig::DistanceOnly()),
            (Partition{{"A", "B", "C", "D"}}));
  // Every opposing pair is separated by the median.
  const int now = s.agents[0].history.last_index();
  for (const char* east : {"A", "C"}) {
    for (const char* west : {"B", "D"}) {
      EXPECT_TRUE(BarrierBetween(s.FindAgent(east)->history.StateAt(now)->position(),
                                 s.FindAgent(west)->history.StateAt(now)->position(),
                                 s.map));
    }
  }
}

TEST_P(GoldenPartitionTest, LaneMerge) {
  const Scene s = *GenScenario(ScenarioKind::kLaneMerge, GetParam());
  EXPECT_EQ(FinalPartition(s, CriteriaConfig{}),
            (Partition{{"A", "B"}, {"C"}}));
  EXPECT_EQ(FinalPartition(s, Without(&CriteriaConfig::use_lane_overlap)),
            (Partition{{"A", "B", "C"}}));
  EXPECT_EQ(FinalPartition(s, CriteriaConfig::DistanceOnly()),
            (Partition{{"A", "B", "C"}}));
}

INSTANTIATE_TEST_SUITE_P(Seeds, GoldenPartitionTest,
                         ::testing::Values(1, 2, 3, 7, 42, 1234, 99999));

}  // namespace
}  // namespace semclique
