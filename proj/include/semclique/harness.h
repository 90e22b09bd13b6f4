#ifndef SEMCLIQUE_HARNESS_H_
#define SEMCLIQUE_HARNESS_H_

// Pipeline runs and report formatting shared by the command-line tool and
// the tests. Every function here is deterministic given its inputs; CSV
// schemas are described in docs/csv_formats.md.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "semclique/clique_engine.h"
#include "semclique/metrics.h"
#include "semclique/predictor.h"
#include "semclique/scene.h"

namespace semclique {

struct RunSettings {
  CriteriaConfig criteria;
  std::string predictor = "cv";
  PredictorConfig predictor_config;
  // Modes generated per agent; Best-of-N looks at eval.n of them.
  int modes = 3;
  EvalOptions eval;
  // Replace d0 of every agent of that kind when set.
  std::optional<double> d0_vehicle;
  std::optional<double> d0_pedestrian;
  RasterConfig raster;

  absl::Status Validate() const;
};

// Scene with the per-kind d0 overrides of `settings` applied.
Scene WithOverrides(const Scene& scene, const RunSettings& settings);

struct SceneRun {
  CliqueTimeline timeline;
  PredictionSet predictions;
  EvalReport report;
};

// Cliques over time, then predictions and metrics on the final partition.
// Prediction and evaluation are skipped (left empty) when `evaluate` is false.
absl::StatusOr<SceneRun> RunScene(const Scene& scene,
                                  const RunSettings& settings,
                                  bool evaluate = true);

// Fixed "%.9g" number formatting for every CSV cell.
std::string FormatNumber(double value);

// timestep,clique_id,agent_id,alpha_min,alpha_max
// alpha_min / alpha_max span the agent's weights to the other members of its
// clique (0 for singletons). With `final_only` only the last snapshot is
// listed.
std::string CliquesCsv(const CliqueTimeline& timeline, bool final_only);
std::string CliquesText(const CliqueTimeline& timeline,
                        const CriteriaConfig& config, bool final_only);

// clique_id,agent_id,kind,history_steps,edge_sum,barrier_cells,divider_cells,
// vehicle_cells,pedestrian_cells
std::string BatchesCsv(const std::vector<CliqueBatch>& batches);

// agent_id,mode,confidence,fallback,t,x,y,heading,vx,vy with t in seconds
// after the clique timestep.
std::string PredictionsCsv(const PredictionSet& predictions, double dt);

// section,id,metric,stamp,value
std::string EvalCsv(const EvalReport& report, const std::string& scene_name);
std::string EvalSummary(const EvalReport& report, const PredictionSet& preds);

struct NamedConfig {
  std::string name;
  CriteriaConfig criteria;
};

// all_on, wo_direction, wo_barrier, wo_lane_overlap, distance_only derived
// from the tunables of `base`.
std::vector<NamedConfig> AblationConfigs(const CriteriaConfig& base);

using NamedScene = std::pair<std::string, Scene>;

// Every *.json scene in `dir`, sorted by file name and named by file stem.
absl::StatusOr<std::vector<NamedScene>> LoadSceneDir(const std::string& dir);

// group,metric,stamp,<config>...,delta_<config>... with one row group per
// scene plus a "mean" group when there is more than one scene. Deltas are
// config minus all_on. Scenes run on up to `threads` workers; the table does
// not depend on the thread count.
absl::StatusOr<std::string> AblateCsv(const std::vector<NamedScene>& scenes,
                                      const RunSettings& settings,
                                      int threads);

}  // namespace semclique

#endif  // SEMCLIQUE_HARNESS_H_
