#include "semclique/clique_engine.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>

#include "absl/strings/str_cat.h"

namespace semclique {
namespace {

struct ActiveAgent {
  const SceneAgent* agent;
  const AgentState* state;
  // Set only when the lane gate applies to this agent.
  std::optional<LaneSet> lanes;
};

bool LaneGateApplies(const AgentType& type, const CriteriaConfig& config) {
  return type.kind == AgentKind::kVehicle ||
         config.lane_overlap_for_pedestrians;
}

class DisjointSets {
 public:
  explicit DisjointSets(size_t n) : parent_(n), size_(n, 1), frozen_(n) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }

  size_t Find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  size_t size(size_t root) const { return size_[root]; }
  bool frozen(size_t root) const { return frozen_[root]; }
  void Freeze(size_t root) { frozen_[root] = true; }

  void Union(size_t a, size_t b) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<size_t> parent_;
  std::vector<size_t> size_;
  std::vector<bool> frozen_;
};

}  // namespace

CriteriaConfig CriteriaConfig::DistanceOnly() {
  CriteriaConfig config;
  config.use_direction = false;
  config.use_barrier = false;
  config.use_lane_overlap = false;
  return config;
}

absl::Status CriteriaConfig::Validate() const {
  if (max_clique_size < 1) {
    return absl::InvalidArgumentError("max_clique_size must be >= 1");
  }
  if (time_samples < 1) {
    return absl::InvalidArgumentError("time_samples must be >= 1");
  }
  if (!(alpha_threshold >= 0.0)) {
    return absl::InvalidArgumentError("alpha_threshold must be >= 0");
  }
  if (!(relevance_distance > 0.0)) {
    return absl::InvalidArgumentError("relevance distance D must be > 0");
  }
  if (!(weight_cap > 0.0)) {
    return absl::InvalidArgumentError("weight_cap must be > 0");
  }
  if (reachability_depth < 0) {
    return absl::InvalidArgumentError("reachability_depth must be >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<SceneGraph> PairwiseAlpha(const Scene& scene, int timestep,
                                         const CriteriaConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const std::vector<int> indices = scene.TimestepIndices();
  if (indices.empty() || timestep < indices.front() ||
      timestep > indices.back()) {
    return absl::OutOfRangeError(
        absl::StrCat("timestep ", timestep, " outside the scene history"));
  }

  std::vector<ActiveAgent> active;
  for (const SceneAgent& agent : scene.agents) {
    const AgentState* state = agent.history.StateAt(timestep);
    if (state != nullptr) active.push_back({&agent, state, std::nullopt});
  }
  std::sort(active.begin(), active.end(),
            [](const ActiveAgent& a, const ActiveAgent& b) {
              return a.agent->id < b.agent->id;
            });

  if (config.use_lane_overlap) {
    for (ActiveAgent& a : active) {
      if (!LaneGateApplies(a.agent->type, config)) continue;
      const std::optional<std::string> divider =
          AssociateLane(*a.state, scene.map, config.association_radius);
      if (!divider.has_value()) continue;
      absl::StatusOr<LaneSet> lanes =
          ReachableLanes(*divider, scene.map, config.reachability_depth);
      if (!lanes.ok()) return lanes.status();
      a.lanes = *std::move(lanes);
    }
  }

  std::vector<std::string> ids;
  ids.reserve(active.size());
  for (const ActiveAgent& a : active) ids.push_back(a.agent->id);
  SceneGraph graph(timestep, std::move(ids));

  for (size_t i = 0; i < active.size(); ++i) {
    for (size_t j = i + 1; j < active.size(); ++j) {
      const ActiveAgent& a = active[i];
      const ActiveAgent& b = active[j];
      const double d =
          ClosestFutureDistance(*a.state, *b.state, scene.horizon).distance;
      const double d0 = std::min(a.agent->type.d0, b.agent->type.d0);
      const double weight = config.use_distance
                                ? DistanceWeight(d, d0, config.weight_cap)
                                : config.weight_cap;
      if (weight == 0.0) continue;
      if (config.use_direction && !(d < config.relevance_distance)) continue;
      if (config.use_barrier &&
          BarrierBetween(a.state->position(), b.state->position(),
                         scene.map)) {
        continue;
      }
      if (config.use_lane_overlap && a.lanes.has_value() &&
          b.lanes.has_value() && !LanesOverlap(*a.lanes, *b.lanes)) {
        continue;
      }
      graph.SetAlpha(i, j, weight);
    }
  }
  return graph;
}

std::vector<Clique> FormCliques(const SceneGraph& graph,
                                const CriteriaConfig& config) {
  const size_t n = graph.size();
  const size_t cap = static_cast<size_t>(std::max(config.max_clique_size, 1));

  struct Edge {
    double weight;
    size_t i;
    size_t j;
  };
  std::vector<Edge> edges;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double w = graph.alpha(i, j);
      if (w > config.alpha_threshold) edges.push_back({w, i, j});
    }
  }
  // Strongest first. Removing weakest-first (ties: smallest pair first) from
  // an oversize component is the reverse of this order, so a merge whose
  // result would exceed the cap marks both sides as final, and everything
  // that later touches a final piece stays split.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.weight, a.i, a.j) > std::tie(b.weight, b.i, b.j);
  });

  DisjointSets sets(n);
  for (const Edge& e : edges) {
    const size_t ra = sets.Find(e.i);
    const size_t rb = sets.Find(e.j);
    if (ra == rb) continue;
    if (sets.frozen(ra) || sets.frozen(rb) ||
        sets.size(ra) + sets.size(rb) > cap) {
      sets.Freeze(ra);
      sets.Freeze(rb);
      continue;
    }
    sets.Union(ra, rb);
  }

  std::map<size_t, std::vector<std::string>> groups;
  for (size_t i = 0; i < n; ++i) {
    groups[sets.Find(i)].push_back(graph.agent_ids()[i]);
  }
  std::vector<Clique> cliques;
  cliques.reserve(groups.size());
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end());
    cliques.push_back({graph.timestep_index(), std::move(members)});
  }
  std::sort(cliques.begin(), cliques.end(),
            [](const Clique& a, const Clique& b) {
              return a.member_ids.front() < b.member_ids.front();
            });
  return cliques;
}

absl::StatusOr<std::vector<int>> SampleTimesteps(const std::vector<int>& indices,
                                                 int samples) {
  if (samples < 1 || static_cast<size_t>(samples) > indices.size()) {
    return absl::FailedPreconditionError(
        absl::StrCat("cannot sample ", samples, " timesteps from ",
                     indices.size(), " available"));
  }
  if (samples == 1) return std::vector<int>{indices.back()};
  std::vector<int> out;
  out.reserve(samples);
  const size_t span = indices.size() - 1;
  for (int k = 0; k < samples; ++k) {
    out.push_back(indices[k * span / (samples - 1)]);
  }
  return out;
}

absl::StatusOr<CliqueTimeline> CliquesOverTime(const Scene& scene,
                                               const CriteriaConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<std::vector<int>> sampled =
      SampleTimesteps(scene.TimestepIndices(), config.time_samples);
  if (!sampled.ok()) return sampled.status();

  CliqueTimeline timeline;
  for (int t : *sampled) {
    absl::StatusOr<SceneGraph> graph = PairwiseAlpha(scene, t, config);
    if (!graph.ok()) return graph.status();
    std::vector<Clique> cliques = FormCliques(*graph, config);
    timeline.snapshots.push_back({t, *std::move(graph), std::move(cliques)});
  }
  timeline.final_cliques = timeline.snapshots.back().cliques;

  const size_t count = timeline.snapshots.size();
  for (size_t k = 0; k < count; ++k) {
    const SceneGraph& g = timeline.snapshots[k].graph;
    for (size_t i = 0; i < g.size(); ++i) {
      for (size_t j = i + 1; j < g.size(); ++j) {
        if (g.alpha(i, j) == 0.0) continue;
        auto [it, inserted] = timeline.edge_history.try_emplace(
            AgentPair{g.agent_ids()[i], g.agent_ids()[j]}, count, 0.0);
        it->second[k] = g.alpha(i, j);
      }
    }
  }
  return timeline;
}

absl::StatusOr<std::vector<CliqueBatch>> BuildCliqueBatches(
    const Scene& scene, const SceneGraph& graph,
    const std::vector<Clique>& cliques, const RasterConfig& raster) {
  const int t = graph.timestep_index();

  std::vector<std::pair<std::string_view, Footprint>> footprints;
  for (const SceneAgent& agent : scene.agents) {
    const AgentState* s = agent.history.StateAt(t);
    if (s != nullptr) {
      footprints.emplace_back(
          agent.id,
          Footprint{s->position(), agent.type.footprint_radius,
                    agent.type.kind});
    }
  }

  std::vector<CliqueBatch> batches;
  for (size_t c = 0; c < cliques.size(); ++c) {
    const Clique& clique = cliques[c];
    CliqueBatch batch;
    batch.clique_id = static_cast<int>(c);
    batch.timestep_index = t;
    batch.reference_id = clique.member_ids.front();
    const SceneAgent* ref = scene.FindAgent(batch.reference_id);
    if (ref == nullptr || ref->history.StateAt(t) == nullptr) {
      return absl::NotFoundError(absl::StrCat(
          "clique member '", batch.reference_id, "' inactive at ", t));
    }
    const AgentState ref_state = *ref->history.StateAt(t);

    for (const std::string& id : clique.member_ids) {
      const SceneAgent* agent = scene.FindAgent(id);
      const std::optional<size_t> gi = graph.IndexOf(id);
      if (agent == nullptr || !gi.has_value() ||
          agent->history.StateAt(t) == nullptr) {
        return absl::NotFoundError(
            absl::StrCat("clique member '", id, "' not in graph"));
      }
      ActiveNode node;
      node.agent_id = id;
      node.kind = agent->type.kind;
      for (const TimedState& ts : agent->history.states) {
        if (ts.index > t) break;
        AgentState rel = ts.state;
        rel.x -= ref_state.x;
        rel.y -= ref_state.y;
        rel.vx -= ref_state.vx;
        rel.vy -= ref_state.vy;
        rel.heading = NormalizeAngle(rel.heading - ref_state.heading);
        node.relative_history.push_back(rel);
      }
      for (const std::string& other : clique.member_ids) {
        const std::optional<size_t> gj = graph.IndexOf(other);
        node.edge_weights.push_back(*gi == *gj ? 0.0
                                               : graph.alpha(*gi, *gj));
      }

      const AgentState& state = *agent->history.StateAt(t);
      std::vector<Footprint> others;
      for (const auto& [owner, fp] : footprints) {
        if (owner != id) others.push_back(fp);
      }
      absl::StatusOr<LocalMap> local = RasterizeLocalMap(
          state, scene.map, raster.size, raster.resolution, others);
      if (!local.ok()) return local.status();
      node.local_map = *std::move(local);
      node.local_map.agent_id = id;
      batch.nodes.push_back(std::move(node));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace semclique
