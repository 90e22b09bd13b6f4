#ifndef SEMCLIQUE_CLIQUE_ENGINE_H_
#define SEMCLIQUE_CLIQUE_ENGINE_H_

// Builds interaction graphs from the distance, direction, barrier and
// lane-overlap criteria and partitions them into size-capped cliques.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "semclique/kinematics.h"
#include "semclique/scene.h"
#include "semclique/semantics.h"

namespace semclique {

struct CriteriaConfig {
  bool use_distance = true;
  bool use_direction = true;
  bool use_barrier = true;
  bool use_lane_overlap = true;

  // Closest-approach radius D for the direction criterion, meters.
  double relevance_distance = 5.0;
  // Edges need alpha strictly above this. 1.0 means d < d0.
  double alpha_threshold = 1.0;
  int max_clique_size = 8;
  // Number of history timesteps sampled by CliquesOverTime.
  int time_samples = 4;

  // Weight for overlapping agents, and the base weight when the distance
  // criterion is disabled.
  double weight_cap = kDefaultWeightCap;
  double association_radius = kDefaultAssociationRadius;
  int reachability_depth = kDefaultReachabilityDepth;
  // Pedestrians are not lane-bound; by default their pairs pass the lane gate.
  bool lane_overlap_for_pedestrians = false;

  // The Euclidean-distance-only grouping.
  static CriteriaConfig DistanceOnly();

  absl::Status Validate() const;
};

// alpha_ij = w(d_ij) * gates for every pair of agents active at `timestep`,
// where w is DistanceWeight with the smaller d0 of the pair and the gates are
// the enabled criteria (direction relevant, no barrier, lanes overlap).
absl::StatusOr<SceneGraph> PairwiseAlpha(const Scene& scene, int timestep,
                                         const CriteriaConfig& config);

// Connected components of the graph thresholded at config.alpha_threshold.
// A component larger than max_clique_size loses its weakest edges (ties:
// smallest id pair first) until every piece fits. Cliques are returned sorted
// by their smallest member id.
std::vector<Clique> FormCliques(const SceneGraph& graph,
                                const CriteriaConfig& config);

// `samples` indices spread uniformly over `indices`, always ending at the
// last one. Requires 1 <= samples <= indices.size().
absl::StatusOr<std::vector<int>> SampleTimesteps(const std::vector<int>& indices,
                                                 int samples);

struct CliqueSnapshot {
  int timestep_index = 0;
  SceneGraph graph;
  std::vector<Clique> cliques;
};

using AgentPair = std::pair<std::string, std::string>;

struct CliqueTimeline {
  std::vector<CliqueSnapshot> snapshots;
  // Partition at the last sampled timestep; this one feeds prediction.
  std::vector<Clique> final_cliques;
  // Per-pair alpha across the snapshots (0 where a pair is inactive), for
  // pairs with a nonzero weight in at least one snapshot.
  std::map<AgentPair, std::vector<double>> edge_history;
};

absl::StatusOr<CliqueTimeline> CliquesOverTime(const Scene& scene,
                                               const CriteriaConfig& config);

struct RasterConfig {
  int size = 64;
  double resolution = 0.5;
};

struct ActiveNode {
  std::string agent_id;
  AgentKind kind = AgentKind::kVehicle;
  // History up to the clique timestep, relative to the reference member's
  // state at that timestep (position, velocity and heading differences).
  std::vector<AgentState> relative_history;
  // alpha to every member of the clique, in member order.
  std::vector<double> edge_weights;
  LocalMap local_map;
};

struct CliqueBatch {
  int clique_id = 0;
  int timestep_index = 0;
  // Smallest member id; relative states are expressed against it.
  std::string reference_id;
  std::vector<ActiveNode> nodes;
};

// Flattens cliques into per-node batches with relative histories, edge
// weights and local maps. `graph` must be the graph the cliques came from.
absl::StatusOr<std::vector<CliqueBatch>> BuildCliqueBatches(
    const Scene& scene, const SceneGraph& graph,
    const std::vector<Clique>& cliques, const RasterConfig& raster);

}  // namespace semclique

#endif  // SEMCLIQUE_CLIQUE_ENGINE_H_
